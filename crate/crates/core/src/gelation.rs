//! Finite-time gelation criterion and gel point.

use serde::Serialize;

use crate::dist::FunctionalityDistribution;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// `|μ₀₂ - 2μ₀₁|` at or below this is treated as the asymptotic (infinite-time) transition.
pub const CRITERION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GelReport {
    pub gels_in_finite_time: bool,
    /// `+∞` when the transition is not reached in finite time.
    pub t_gel: f64,
    /// `None` when the system never gels, `Some(1.0)` for the asymptotic case.
    pub c_gel: Option<f64>,
    /// `μ₀₂ - 2μ₀₁ = Σ (m² - 2m) f_m`.
    pub criterion_value: f64,
}

impl GelReport {
    /// True if the gel point is reached, possibly only as `t → ∞`.
    pub fn reaches_gel_point(&self) -> bool {
        self.c_gel.is_some()
    }

    /// True if a state at conversion `c` lies strictly beyond the gel point.
    pub fn is_post_gel(&self, c: f64) -> bool {
        self.gels_in_finite_time && self.c_gel.is_some_and(|cg| c > cg)
    }
}

pub fn analyze_gelation(f: &FunctionalityDistribution) -> GelReport {
    analyze_gelation_with_rate(f, 1.0)
}

/// As [`analyze_gelation`] for a process running at rate `k_p`; only `t_gel` depends on it.
pub fn analyze_gelation_with_rate(f: &FunctionalityDistribution, rate_scale: f64) -> GelReport {
    let criterion_value = compensated_sum(f.iter().map(|(m, fm)| {
        let m = m as f64;
        (m * m - 2.0 * m) * fm
    }));
    let mu01 = f.partial_moment(1);
    let excess = compensated_sum(f.iter().map(|(m, fm)| {
        let m = m as f64;
        (m * m - m) * fm
    }));
    if criterion_value.abs() <= CRITERION_TOLERANCE {
        GelReport {
            gels_in_finite_time: false,
            t_gel: f64::INFINITY,
            c_gel: Some(1.0),
            criterion_value: 0.0,
        }
    } else if criterion_value > 0.0 {
        GelReport {
            gels_in_finite_time: true,
            t_gel: 1.0 / (rate_scale * criterion_value),
            c_gel: Some(mu01 / excess),
            criterion_value,
        }
    } else {
        GelReport {
            gels_in_finite_time: false,
            t_gel: f64::INFINITY,
            c_gel: None,
            criterion_value,
        }
    }
}

/// Gel conversion `1/(m-1)` of a monodisperse system.
pub fn flory_conversion(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain(format!("Flory conversion needs m >= 2, got {m}")));
    }
    Ok(1.0 / (m - 1) as f64)
}

/// Terminator fraction `(m² - 2m)/(m² - 2m + 1)` above which an `f₁`/`f_m` mixture never gels.
pub fn prevention_threshold(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::domain(format!(
            "functionality {m} never gels in finite time, nothing to prevent"
        )));
    }
    let m = m as f64;
    let a = m * m - 2.0 * m;
    Ok(a / (a + 1.0))
}
