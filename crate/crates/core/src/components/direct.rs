//! Reference backend: the Lagrange coefficients `[z^{n-2}] U₁(z)^n` by
//! repeated schoolbook convolution. Only additions of non-negative terms, so
//! structural zeros stay exactly zero.

use super::tilt::{degree, ln_eval, ln_tau_for_mean, tilted};

/// `w(n)` for `n = 2..=n_max`, index 0 holding `w(2)`.
pub(super) fn sizes(u1: &[f64], mu1: f64, n_max: usize) -> Vec<f64> {
    if n_max < 2 {
        return Vec::new();
    }
    let deg = degree(u1);
    let ln_tau = match deg {
        0 => 0.0,
        1 => ln_tau_for_mean(u1, (1.0 - 1.0 / n_max as f64).max(0.5)).unwrap_or(0.0),
        _ => ln_tau_for_mean(u1, 1.0).unwrap_or(0.0),
    };
    let q = tilted(u1, ln_tau);
    let ln_norm = ln_eval(u1, ln_tau);
    let q = &q[..=deg];

    let len = n_max - 1;
    let mut power = vec![0.0; len];
    power[0] = 1.0;
    let mut next = vec![0.0; len];
    let mut out = Vec::with_capacity(len);
    for n in 1..=n_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (i, &p) in power.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &qj) in q.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                next[i + j] += p * qj;
            }
        }
        std::mem::swap(&mut power, &mut next);
        if n >= 2 {
            let k = n - 2;
            let value = power[k];
            out.push(if value > 0.0 {
                let ln_w = (mu1 / (n - 1) as f64).ln() + n as f64 * ln_norm - k as f64 * ln_tau + value.ln();
                ln_w.exp()
            } else {
                0.0
            });
        }
    }
    out
}
