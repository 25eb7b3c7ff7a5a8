use serde::Serialize;

use crate::dist::{gf_biased_eval, gf_eval, moments_exact, DegreeDistribution};
use crate::error::{Error, Result};
use crate::gelation::CRITERION_TOLERANCE;

use super::biased_degree;

/// `|1 - t/t_gel|` below which the expected size is reported as divergent.
pub const GEL_POINT_NEIGHBOURHOOD: f64 = 1e-9;

const MAX_ITERATIONS: usize = 1_000_000;

/// Number-average size of finite components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExpectedSize {
    Finite { value: f64 },
    /// Diverges as `|t - t_gel|^-order`.
    Divergent { order: u32 },
    /// Every vertex belongs to the gel.
    Empty,
}

impl ExpectedSize {
    /// The size as a float, `+∞` for the divergent case and NaN when there is no sol.
    pub fn value(&self) -> f64 {
        match *self {
            ExpectedSize::Finite { value } => value,
            ExpectedSize::Divergent { .. } => f64::INFINITY,
            ExpectedSize::Empty => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentStats {
    /// `W₁(1)`, the smallest fixed point of `U₁` on `[0, 1]`.
    pub r0: f64,
    pub gel_fraction: f64,
    pub expected_size: ExpectedSize,
}

/// Sign of `μ₂ - 2μ₁`, with a relative dead zone around zero.
fn beyond_gel_point(dd: &DegreeDistribution) -> Option<bool> {
    let m = moments_exact(dd);
    let excess = m.mu2 - 2.0 * m.mu1;
    if excess.abs() <= CRITERION_TOLERANCE * m.mu1.max(1.0) {
        None
    } else {
        Some(excess > 0.0)
    }
}

/// Smallest root of `U₁(x) = x` on `[0, 1]`.
pub fn fixed_point_r0(dd: &DegreeDistribution) -> Result<f64> {
    let u1 = biased_degree(dd)?;
    if u1[0] <= 0.0 {
        return Ok(0.0);
    }
    if beyond_gel_point(dd) != Some(true) {
        return Ok(1.0);
    }
    let eval = |x: f64| gf_biased_eval(dd, x.clamp(0.0, 1.0));

    // Monotone iteration from below, then Newton. U₁(x) - x is convex and
    // positive left of r0, so Newton from the left also increases monotonically.
    let mut x = 0.0_f64;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let next = eval(x)?.value;
        let step = next - x;
        x = next;
        if step < 1e-3 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numeric("fixed-point iteration for r0 did not settle"));
    }
    for _ in 0..200 {
        let p = eval(x)?;
        let g = p.value - x;
        // g ≤ 0 means rounding has put us on the root
        if g <= 0.0 {
            return Ok(x);
        }
        let slope = p.derivative - 1.0;
        if slope >= 0.0 {
            return Err(Error::numeric(format!("Newton step for r0 lost monotonicity at x = {x}")));
        }
        let step = -g / slope;
        x += step;
        if step <= 1e-15 * x {
            return Ok(x);
        }
    }
    Err(Error::numeric("Newton polish for r0 did not converge"))
}

pub fn component_stats(dd: &DegreeDistribution) -> Result<ComponentStats> {
    let r0 = fixed_point_r0(dd)?;
    let gel_fraction = if r0 == 1.0 { 0.0 } else { 1.0 - gf_eval(dd, r0)?.value };

    let state = dd.state();
    let t = state.scaled_time();
    let (mu01, mu02) = (state.mu01(), state.mu02());
    let criterion = mu02 - 2.0 * mu01;

    let near_gel_point = criterion > CRITERION_TOLERANCE && t.is_finite() && (1.0 - t * criterion).abs() < GEL_POINT_NEIGHBOURHOOD;
    let expected_size = if near_gel_point {
        ExpectedSize::Divergent { order: 1 }
    } else if r0 == 1.0 {
        if t.is_finite() {
            let denom = 1.0 + 2.0 * mu01 * t - mu02 * t;
            if denom <= 0.0 {
                ExpectedSize::Divergent { order: 1 }
            } else {
                ExpectedSize::Finite {
                    value: 1.0 + mu01 * mu01 * t / denom,
                }
            }
        } else {
            let m = moments_exact(dd);
            let denom = 2.0 * m.mu1 - m.mu2;
            if denom <= CRITERION_TOLERANCE * m.mu1.max(1.0) {
                ExpectedSize::Divergent { order: 1 }
            } else {
                ExpectedSize::Finite {
                    value: 1.0 + m.mu1 * m.mu1 / denom,
                }
            }
        }
    } else {
        let sol = 1.0 - gel_fraction;
        if sol <= 0.0 {
            ExpectedSize::Empty
        } else {
            let mu1 = dd.mean_degree();
            let slope = gf_biased_eval(dd, r0)?.derivative;
            ExpectedSize::Finite {
                value: 1.0 + mu1 * r0 * r0 / (sol * (1.0 - slope)),
            }
        }
    };

    Ok(ComponentStats {
        r0,
        gel_fraction,
        expected_size,
    })
}
