//! Exponential tilting of the excess-degree distribution.
//!
//! Coefficients of `U₁(z)^n` decay or grow geometrically, which wrecks the
//! accuracy of transform-based products. Rescaling `z → τz` moves the
//! coefficient of interest to the centre of the tilted distribution, where
//! FFT round-off is small relative to the value itself.

/// `ln Σ_j exp(a_j)` over finite entries.
fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let peak = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    peak + terms.map(|a| (a - peak).exp()).sum::<f64>().ln()
}

fn support(coeffs: &[f64]) -> impl Iterator<Item = (usize, f64)> + Clone + '_ {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(j, &c)| (j, c.ln()))
}

/// Highest index with a positive coefficient.
pub fn degree(coeffs: &[f64]) -> usize {
    coeffs.iter().rposition(|&c| c > 0.0).unwrap_or(0)
}

/// `ln Σ_j c_j e^{j y}`.
pub fn ln_eval(coeffs: &[f64], ln_tau: f64) -> f64 {
    log_sum_exp(support(coeffs).map(|(j, lc)| lc + j as f64 * ln_tau))
}

fn tilted_mean(coeffs: &[f64], ln_tau: f64) -> f64 {
    let norm = ln_eval(coeffs, ln_tau);
    support(coeffs)
        .map(|(j, lc)| j as f64 * (lc + j as f64 * ln_tau - norm).exp())
        .sum()
}

/// `ln τ` such that the tilted distribution `c_j τ^j / P(τ)` has mean `target`.
///
/// Exists when `c_0 > 0` and `0 < target < degree`.
pub fn ln_tau_for_mean(coeffs: &[f64], target: f64) -> Option<f64> {
    let deg = degree(coeffs) as f64;
    if coeffs.first().is_none_or(|&c| c <= 0.0) || !(target > 0.0 && target < deg) {
        return None;
    }
    // The tilted mean is increasing in ln τ.
    let (mut lo, mut hi) = (-1.0, 1.0);
    while tilted_mean(coeffs, lo) > target {
        lo *= 2.0;
        if lo < -1e6 {
            return None;
        }
    }
    while tilted_mean(coeffs, hi) < target {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if tilted_mean(coeffs, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Probability-normalised tilt `c_j τ^j / P(τ)`.
pub fn tilted(coeffs: &[f64], ln_tau: f64) -> Vec<f64> {
    let norm = ln_eval(coeffs, ln_tau);
    coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if c > 0.0 {
                (c.ln() + j as f64 * ln_tau - norm).exp()
            } else {
                0.0
            }
        })
        .collect()
}

/// Rescaling for the functional equation `W₁(x) = x U₁(W₁(x))`.
///
/// With `x = ρy` and `W₁ = τZ`, the equation becomes `Z = y φ(Z)` where
/// `φ(z) = (ρ/τ) U₁(τz)`. `ρ` is the radius of convergence of `W₁`, so the
/// coefficients of `Z` decay at most polynomially.
#[derive(Debug, Clone)]
pub struct SeriesScaling {
    pub ln_tau: f64,
    pub ln_rho: f64,
    pub phi: Vec<f64>,
}

impl SeriesScaling {
    /// Needs `u1[0] > 0`.
    pub fn new(u1: &[f64]) -> Self {
        let deg = degree(u1);
        match deg {
            0 => Self {
                ln_tau: 0.0,
                ln_rho: 0.0,
                phi: vec![1.0],
            },
            1 => {
                // W₁ = a x / (1 - b x): singular at x = 1/b.
                let b = u1[1];
                let ln_rho = -b.ln();
                Self {
                    ln_tau: 0.0,
                    ln_rho,
                    phi: u1.iter().take(2).map(|&c| c / b).collect(),
                }
            }
            _ => {
                let ln_tau = ln_tau_for_mean(u1, 1.0).expect("critical tilt exists for degree >= 2");
                let ln_rho = ln_tau - ln_eval(u1, ln_tau);
                Self {
                    ln_tau,
                    ln_rho,
                    phi: tilted(u1, ln_tau),
                }
            }
        }
    }

    /// Exponential decay rate of the component-size distribution, `ln ρ`.
    pub fn decay_rate(&self) -> f64 {
        self.ln_rho
    }
}
