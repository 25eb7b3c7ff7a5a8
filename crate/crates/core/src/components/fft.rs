//! Per-size transform backend: each `[z^{n-2}] U₁(z)^n` is a pointwise power
//! in the Fourier domain followed by one inverse transform.

use super::tilt::{degree, ln_eval, ln_tau_for_mean, tilted};
use super::NOISE_FLOOR;
use crate::poly::PolyMul;

/// `w(n)` for `n = 2..=n_max` and the sizes that fell below the noise floor.
pub(super) fn sizes(u1: &[f64], mu1: f64, n_max: usize) -> (Vec<f64>, Vec<usize>) {
    let mut out = Vec::with_capacity(n_max.saturating_sub(1));
    let mut unreliable = Vec::new();
    if n_max < 2 {
        return (out, unreliable);
    }
    let deg = degree(u1);
    out.push(mu1 * u1[0] * u1[0]);

    let critical = (deg >= 2).then(|| ln_tau_for_mean(u1, 1.0)).flatten();
    let mut pm = PolyMul::new();
    for n in 3..=n_max {
        if deg == 0 {
            out.push(0.0);
            continue;
        }
        let k = n - 2;
        let ln_tau = match critical {
            Some(lt) => lt,
            None => match ln_tau_for_mean(u1, k as f64 / n as f64) {
                Some(lt) => lt,
                None => {
                    out.push(0.0);
                    unreliable.push(n);
                    continue;
                }
            },
        };
        let q = tilted(u1, ln_tau);
        let ln_norm = ln_eval(u1, ln_tau);
        let size = (n * deg + 1).next_power_of_two();
        let spectrum = pm
            .forward(&q[..=deg], size)
            .into_iter()
            .map(|z| z.powu(n as u32))
            .collect();
        let coeffs = pm.inverse(spectrum);
        let peak = coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let value = coeffs[k];
        if value <= NOISE_FLOOR * peak {
            out.push(0.0);
            unreliable.push(n);
            continue;
        }
        let ln_w = (mu1 / (n - 1) as f64).ln() + n as f64 * ln_norm - k as f64 * ln_tau + value.ln();
        out.push(ln_w.exp());
    }
    (out, unreliable)
}
