//! Series-inversion backend: solves `W₁ = x U₁(W₁)` as a truncated power
//! series by Newton iteration with FFT products, then reads `w(n)` off
//! `W = x U(W₁)`. Quasi-linear in `n_max`.
//!
//! Everything runs in the rescaled variables of [`SeriesScaling`], where
//! the solution's coefficients decay polynomially rather than geometrically.

use std::collections::HashMap;

use super::tilt::SeriesScaling;
use super::NOISE_FLOOR;
use crate::poly::PolyMul;

/// `Σ_j c_j Z^j mod y^len`, skipping zero coefficients with cached powers of `Z`.
fn compose(pm: &mut PolyMul, coeffs: &[f64], z: &[f64], len: usize) -> Vec<f64> {
    let support: Vec<usize> = (0..coeffs.len()).filter(|&j| coeffs[j] != 0.0).collect();
    let mut out = vec![0.0; len];
    let Some(&top) = support.last() else {
        return out;
    };
    let mut powers: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut acc = vec![0.0; len];
    acc[0] = coeffs[top];
    let mut prev = top;
    for &j in support.iter().rev().skip(1) {
        let gap = prev - j;
        let zg = power(pm, &mut powers, z, gap, len);
        acc = pm.mul(&acc, &zg, len);
        acc[0] += coeffs[j];
        prev = j;
    }
    if prev > 0 {
        let zg = power(pm, &mut powers, z, prev, len);
        acc = pm.mul(&acc, &zg, len);
    }
    out.copy_from_slice(&acc[..len]);
    out
}

fn power(
    pm: &mut PolyMul,
    cache: &mut HashMap<usize, Vec<f64>>,
    z: &[f64],
    e: usize,
    len: usize,
) -> Vec<f64> {
    if let Some(p) = cache.get(&e) {
        return p.clone();
    }
    let mut result: Option<Vec<f64>> = None;
    let mut base = z[..z.len().min(len)].to_vec();
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => pm.mul(&r, &base, len),
            });
        }
        k >>= 1;
        if k > 0 {
            base = pm.mul(&base, &base, len);
        }
    }
    let mut r = result.expect("exponent is positive");
    r.resize(len, 0.0);
    cache.insert(e, r.clone());
    r
}

/// Solves `Z = y φ(Z)` modulo `y^len`.
fn solve_tree_equation(pm: &mut PolyMul, phi: &[f64], len: usize) -> Vec<f64> {
    let mut z = vec![0.0; len.min(2)];
    if len > 1 {
        z[1] = phi[0];
    }
    let dphi: Vec<f64> = phi.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect();
    let mut k = 2;
    while k < len {
        k = (2 * k).min(len);
        z.resize(k, 0.0);
        let value = compose(pm, phi, &z, k);
        let slope = compose(pm, &dphi, &z, k);
        // F = Z - yφ(Z), F' = 1 - yφ'(Z)
        let mut residual = z.clone();
        let mut jacobian = vec![0.0; k];
        jacobian[0] = 1.0;
        for i in 1..k {
            residual[i] -= value[i - 1];
            jacobian[i] = -slope[i - 1];
        }
        let inv = pm.inverse_series(&jacobian, k);
        let step = pm.mul(&residual, &inv, k);
        for (zi, si) in z.iter_mut().zip(&step) {
            *zi -= si;
        }
        z[0] = 0.0;
    }
    z.truncate(len);
    z
}

/// `w(n)` for `n = 2..=n_max` and the sizes that fell below the noise floor.
///
/// `u` is the degree marginal and `u1` the excess-degree distribution, with `u1[0] > 0`.
pub(super) fn sizes(u: &[f64], u1: &[f64], n_max: usize) -> (Vec<f64>, Vec<usize>) {
    if n_max < 2 {
        return (Vec::new(), Vec::new());
    }
    let scaling = SeriesScaling::new(u1);
    let mut pm = PolyMul::new();
    let z = solve_tree_equation(&mut pm, &scaling.phi, n_max);

    // U(τZ) - u(0), with coefficients normalised by their largest entry.
    let ln_p: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if j > 0 && c > 0.0 {
                c.ln() + j as f64 * scaling.ln_tau
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let ln_k = ln_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = ln_p.iter().map(|&l| (l - ln_k).exp()).collect();
    let s = compose(&mut pm, &p, &z, n_max);

    let peak = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out = Vec::with_capacity(n_max - 1);
    let mut unreliable = Vec::new();
    for n in 2..=n_max {
        let value = s[n - 1];
        if value <= NOISE_FLOOR * peak {
            out.push(0.0);
            unreliable.push(n);
        } else {
            out.push((ln_k + value.ln() - (n - 1) as f64 * scaling.ln_rho).exp());
        }
    }
    (out, unreliable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_tree_series_is_catalan() {
        // φ(z) = (1 + z)^2 / 4
        let mut pm = PolyMul::new();
        let z = solve_tree_equation(&mut pm, &[0.25, 0.5, 0.25], 200);
        // Lagrange: [y^n] Z = (1/n) [z^{n-1}] φ^n = (1/n) C(2n, n-1) 4^{-n}
        for (n, &got) in z.iter().enumerate().skip(1) {
            let ln_c: f64 = (0..n - 1).map(|i| (((2 * n - i) as f64) / ((i + 1) as f64)).ln()).sum();
            let want = (ln_c - n as f64 * 4f64.ln()).exp() / n as f64;
            assert!(((got - want) / want).abs() < 1e-12, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn sparse_composition_matches_dense_horner() {
        let mut pm = PolyMul::new();
        let z: Vec<f64> = (0..50).map(|i| if i == 0 { 0.0 } else { 1.0 / i as f64 }).collect();
        let coeffs = [0.5, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.2];
        let sparse = compose(&mut pm, &coeffs, &z, 50);
        let mut dense = vec![0.0; 50];
        for &c in coeffs.iter().rev() {
            dense = crate::poly::mul_naive(&dense, &z, 50);
            dense[0] += c;
        }
        for (a, b) in sparse.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
