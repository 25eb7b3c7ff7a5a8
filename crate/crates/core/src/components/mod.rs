//! Finite-component size distribution `w(n)`, its asymptote, the gel
//! fraction and the expected component size.
//!
//! `w(n)` follows from Lagrange inversion of `W₁ = x U₁(W₁)`, `W = x U(W₁)`:
//! `w(1) = u(0)` and `w(n) = μ₁/(n-1) · [z^{n-2}] U₁(z)^n` for `n > 1`.

mod asymptote;
mod direct;
mod fft;
mod series;
mod stats;
mod tilt;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::dist::{DegreeDistribution, SystemState};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, gcd, ln_binomial};

pub use asymptote::{asymptote, AsymptoteCoefficients};
pub use stats::{component_stats, fixed_point_r0, ComponentStats, ExpectedSize};

/// Transform-based values below this fraction of the largest coefficient (in the tilted
/// scale) are treated as round-off.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Agreement required between backends by [`cross_check`].
pub const BACKEND_TOLERANCE: f64 = 1e-10;

/// Largest size the direct backend is used for when refining flagged values.
pub const DIRECT_REFINE_LIMIT: usize = 8192;

/// Largest `n_max` tried by [`size_distribution_adaptive`].
pub const ADAPTIVE_MAX_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// One transform, pointwise power and inverse per size.
    PerSizeFft,
    /// Repeated schoolbook convolution.
    DirectConvolution,
    /// Newton iteration on the functional equation.
    #[default]
    SeriesInversion,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::DirectConvolution, Method::PerSizeFft, Method::SeriesInversion];

    pub fn name(self) -> &'static str {
        match self {
            Method::PerSizeFft => "per-size-fft",
            Method::DirectConvolution => "direct-convolution",
            Method::SeriesInversion => "series-inversion",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fft" | "per-size-fft" => Ok(Method::PerSizeFft),
            "direct" | "direct-convolution" => Ok(Method::DirectConvolution),
            "newton" | "series" | "series-inversion" => Ok(Method::SeriesInversion),
            other => Err(Error::Parse(format!("unknown method `{other}` (fft, direct, newton)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeOptions {
    /// Recompute values flagged below the noise floor with the direct backend.
    pub refine_below_floor: bool,
}

impl Default for SizeOptions {
    fn default() -> Self {
        Self {
            refine_below_floor: true,
        }
    }
}

/// `w(n)`, the probability that a random vertex sits in a finite component of size `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeDistribution {
    /// `values[n - 1] = w(n)` for `n = 1..=n_max`.
    values: Vec<f64>,
    state: SystemState,
    mass: f64,
    truncation_deficit: f64,
    method: Method,
    /// Sizes whose value fell below the noise floor and was clamped to zero.
    unreliable: Vec<usize>,
    /// Sizes recomputed with the direct backend after being flagged.
    refined: Vec<usize>,
}

impl SizeDistribution {
    fn assemble(values: Vec<f64>, state: SystemState, method: Method, deficit: f64) -> Self {
        let mass = compensated_sum(values.iter().copied());
        Self {
            values,
            state,
            mass,
            truncation_deficit: deficit,
            method,
            unreliable: Vec::new(),
            refined: Vec::new(),
        }
    }

    /// `w(n)`; zero outside `1..=n_max`.
    pub fn w(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.values.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    /// `Σ_{n <= n_max} w(n)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Estimated `Σ_{n > n_max} w(n)`, from the known tail shape.
    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn unreliable(&self) -> &[usize] {
        &self.unreliable
    }

    pub fn refined(&self) -> &[usize] {
        &self.refined
    }

    /// `Σ n w(n) / Σ w(n)` over the computed range.
    pub fn mean_size(&self) -> f64 {
        let first = compensated_sum(self.values.iter().enumerate().map(|(i, &w)| (i + 1) as f64 * w));
        first / self.mass
    }

    /// Iterates `(n, w(n))`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &w)| (i + 1, w))
    }
}

/// Excess-degree distribution `u₁(n) = (n+1) u(n+1) / μ₁`, `n = 0..m_max-1`.
pub fn biased_degree(dd: &DegreeDistribution) -> Result<Vec<f64>> {
    let mu1 = dd.mean_degree();
    if mu1 <= 0.0 {
        return Err(Error::domain("excess-degree distribution needs at least one edge"));
    }
    Ok(dd
        .marginal()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &u)| n as f64 * u / mu1)
        .collect())
}

pub fn size_distribution(dd: &DegreeDistribution, n_max: usize, method: Method) -> Result<SizeDistribution> {
    size_distribution_with(dd, n_max, method, SizeOptions::default())
}

pub fn size_distribution_with(
    dd: &DegreeDistribution,
    n_max: usize,
    method: Method,
    opts: SizeOptions,
) -> Result<SizeDistribution> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let u = dd.marginal();
    let state = *dd.state();
    let mut values = vec![0.0; n_max];
    values[0] = u[0];

    let mu1 = dd.mean_degree();
    if mu1 <= 0.0 {
        // No edges: every vertex is isolated.
        return Ok(SizeDistribution::assemble(values, state, method, 0.0));
    }
    let u1 = biased_degree(dd)?;
    if u1[0] <= 0.0 {
        // W₁ = x U₁(W₁) has only the zero solution: no finite component beyond singletons.
        return Ok(SizeDistribution::assemble(values, state, method, 0.0));
    }
    let prefactor = state.mu01() * state.density();

    let (tail, unreliable) = match method {
        Method::DirectConvolution => (direct::sizes(&u1, prefactor, n_max), Vec::new()),
        Method::PerSizeFft => fft::sizes(&u1, prefactor, n_max),
        Method::SeriesInversion => series::sizes(u, &u1, n_max),
    };
    values[1..].copy_from_slice(&tail);

    let mut refined = Vec::new();
    let mut remaining = unreliable;
    if opts.refine_below_floor {
        if let Some(&largest) = remaining.iter().max() {
            if largest <= DIRECT_REFINE_LIMIT {
                let exact = direct::sizes(&u1, prefactor, largest);
                for &n in &remaining {
                    values[n - 1] = exact[n - 2];
                }
                refined = std::mem::take(&mut remaining);
            }
        }
    }
    for v in &mut values {
        if *v < 0.0 || !v.is_finite() {
            *v = 0.0;
        }
    }

    let deficit = tail_estimate(&values, &u1);
    let mut sd = SizeDistribution::assemble(values, state, method, deficit);
    sd.unreliable = remaining;
    sd.refined = refined;
    Ok(sd)
}

/// Doubles `n_max` from 1024 until the estimated truncation deficit drops below `target`.
pub fn size_distribution_adaptive(
    dd: &DegreeDistribution,
    method: Method,
    target: f64,
) -> Result<SizeDistribution> {
    let mut n_max = 1024;
    loop {
        let sd = size_distribution(dd, n_max, method)?;
        if sd.truncation_deficit() <= target || n_max >= ADAPTIVE_MAX_SIZE {
            return Ok(sd);
        }
        n_max *= 2;
    }
}

/// Runs all three backends and checks entrywise relative agreement.
pub fn cross_check(dd: &DegreeDistribution, n_max: usize) -> Result<[SizeDistribution; 3]> {
    let [a, b, c] = Method::ALL.map(|m| size_distribution(dd, n_max, m));
    let all = [a?, b?, c?];
    for pair in [(0, 1), (0, 2)] {
        let (l, r) = (&all[pair.0], &all[pair.1]);
        for n in 1..=n_max {
            let (x, y) = (l.w(n), r.w(n));
            let scale = x.abs().max(y.abs());
            if scale > f64::MIN_POSITIVE * 1e10 && (x - y).abs() > BACKEND_TOLERANCE * scale {
                return Err(Error::Consistency {
                    n,
                    left: l.method().name(),
                    right: r.method().name(),
                    left_value: x,
                    right_value: y,
                });
            }
        }
    }
    Ok(all)
}

/// Tail mass beyond `n_max`, extrapolated from the last values with the
/// asymptotic shape `w(n) ∝ n^γ ρ^{-n}`.
fn tail_estimate(values: &[f64], u1: &[f64]) -> f64 {
    let deg = tilt::degree(u1);
    if deg == 0 || values.len() < 2 {
        return 0.0;
    }
    let period = u1
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0.0)
        .fold(0, |g, (j, _)| gcd(g, j))
        .max(1);
    let n = values.len();
    let window = period.min(n);
    let anchor = values[n - window..].iter().sum::<f64>() / window as f64;
    if anchor == 0.0 {
        return 0.0;
    }
    let kappa = tilt::SeriesScaling::new(u1).decay_rate().max(0.0);
    let gamma = if deg == 1 { 1.0 } else { -1.5 };
    let nf = n as f64;
    let kn = kappa * nf;
    let sum = if kn >= 30.0 || deg == 1 && kappa > 0.0 {
        let mut total = 0.0;
        let mut j = 1usize;
        loop {
            let term = (1.0 + j as f64 / nf).powf(gamma) * (-kappa * j as f64).exp();
            total += term;
            if term < 1e-17 * total || j > 100_000_000 {
                break;
            }
            j += 1;
        }
        total
    } else if deg == 1 {
        f64::INFINITY
    } else {
        // ∫₀^∞ (1 + x/n)^{-3/2} e^{-κx} dx
        let root = kn.sqrt();
        let scaled_erfc = if root > 0.0 {
            (std::f64::consts::PI * kn).sqrt() * (kn + (erfc(root)).ln()).exp()
        } else {
            0.0
        };
        nf * (2.0 - 2.0 * scaled_erfc)
    };
    anchor * sum
}

/// Closed form for a monodisperse system of functionality `m`:
/// `w(n) = [m c / (n-1)] C(n(m-1), n-2) s^{n-2} (1+s)^{-n(m-1)}` with `s = c/(1-c)`.
pub fn size_distribution_monodisperse(m: usize, state: &SystemState, n_max: usize) -> Result<SizeDistribution> {
    if m < 1 {
        return Err(Error::domain("functionality must be at least 1"));
    }
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    if (state.mu01() - m as f64).abs() > 1e-12 * m as f64 || (state.mu02() - (m * m) as f64).abs() > 1e-9 {
        return Err(Error::domain(format!("state does not belong to a monodisperse system with m = {m}")));
    }
    let c = state.density();
    let q = state.density_complement();
    let mut values = vec![0.0; n_max];
    values[0] = q.powi(m as i32);
    if c > 0.0 {
        let ln_s = c.ln() - q.ln();
        let ln_1ps = -q.ln();
        for n in 2..=n_max {
            let top = (n * (m - 1)) as u64;
            let k = (n - 2) as u64;
            if k > top {
                continue;
            }
            values[n - 1] = if q == 0.0 {
                // c = 1: only dimers of monofunctional vertices survive.
                if m == 1 && n == 2 {
                    c
                } else {
                    0.0
                }
            } else {
                let ln_w = (m as f64 * c / (n - 1) as f64).ln() + ln_binomial(top, k) + k as f64 * ln_s
                    - top as f64 * ln_1ps;
                ln_w.exp()
            };
        }
    }
    Ok(SizeDistribution::assemble(values, *state, Method::DirectConvolution, f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{degree_distribution, state_from_density, FunctionalityDistribution};

    fn dd(entries: &[(usize, f64)], c: f64) -> DegreeDistribution {
        let f = FunctionalityDistribution::new(entries.iter().copied()).unwrap();
        degree_distribution(&f, &state_from_density(&f, c).unwrap())
    }

    /// Brute-force `[z^k] P(z)^n` by expanding the product term by term.
    fn coefficient_of_power(p: &[f64], n: usize, k: usize) -> f64 {
        let mut acc = vec![1.0];
        for _ in 0..n {
            let mut next = vec![0.0; acc.len() + p.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in p.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            acc = next;
        }
        acc.get(k).copied().unwrap_or(0.0)
    }

    #[test]
    fn excess_degree_examples() {
        assert_eq!(biased_degree(&dd(&[(3, 1.0)], 0.5)).unwrap(), vec![0.25, 0.5, 0.25]);
        for &c in &[0.1, 0.5, 0.8] {
            let u1 = biased_degree(&dd(&[(2, 1.0)], c)).unwrap();
            assert!((u1[0] - (1.0 - c)).abs() < 1e-15 && (u1[1] - c).abs() < 1e-15);
        }
        let u1 = biased_degree(&dd(&[(1, 0.2), (4, 0.5), (7, 0.3)], 0.37)).unwrap();
        assert!((compensated_sum(u1.iter().copied()) - 1.0).abs() < 1e-12);
        assert!(biased_degree(&dd(&[(3, 1.0)], 0.0)).is_err());
    }

    #[test]
    fn trifunctional_spot_values() {
        let d = dd(&[(3, 1.0)], 0.5);
        for method in Method::ALL {
            let sd = size_distribution(&d, 16, method).unwrap();
            assert_eq!(sd.w(1), 0.125);
            assert!((sd.w(2) - 3.0 / 32.0).abs() < 1e-14, "{method}: {}", sd.w(2));
        }
    }

    #[test]
    fn lagrange_formula_against_brute_force_expansion() {
        let d = dd(&[(1, 0.3), (3, 0.5), (4, 0.2)], 0.42);
        let u1 = biased_degree(&d).unwrap();
        let mu1 = d.mean_degree();
        for method in Method::ALL {
            let sd = size_distribution(&d, 30, method).unwrap();
            for n in 2..=30 {
                let want = mu1 / (n - 1) as f64 * coefficient_of_power(&u1, n, n - 2);
                assert!(((sd.w(n) - want) / want).abs() < 1e-11, "{method} n={n}");
            }
        }
    }

    #[test]
    fn monodisperse_closed_form_matches_direct() {
        for (m, c) in [(3usize, 0.5), (2, 0.5), (3, 0.3), (4, 0.8), (6, 0.1), (1, 0.6)] {
            let f = FunctionalityDistribution::monodisperse(m).unwrap();
            let s = state_from_density(&f, c).unwrap();
            let closed = size_distribution_monodisperse(m, &s, 200).unwrap();
            let direct = size_distribution(&degree_distribution(&f, &s), 200, Method::DirectConvolution).unwrap();
            for n in 1..=200 {
                let (a, b) = (closed.w(n), direct.w(n));
                assert!((a - b).abs() <= 1e-11 * a.abs().max(b.abs()) + 1e-300, "m={m} c={c} n={n}: {a} vs {b}");
            }
        }
        let f3 = FunctionalityDistribution::monodisperse(3).unwrap();
        let s = state_from_density(&f3, 0.5).unwrap();
        let closed = size_distribution_monodisperse(3, &s, 2).unwrap();
        assert!((closed.w(2) - 3.0 / 32.0).abs() < 1e-15);
        assert_eq!(closed.w(1), 0.125);
        assert!(size_distribution_monodisperse(0, &s, 2).is_err());
        assert!(size_distribution_monodisperse(4, &s, 2).is_err());
    }

    #[test]
    fn bifunctional_closed_form_at_five() {
        let f = FunctionalityDistribution::monodisperse(2).unwrap();
        let s = state_from_density(&f, 0.5).unwrap();
        let closed = size_distribution_monodisperse(2, &s, 5).unwrap();
        let direct = size_distribution(&degree_distribution(&f, &s), 5, Method::DirectConvolution).unwrap();
        assert!((closed.w(5) - direct.w(5)).abs() < 1e-12);
    }

    #[test]
    fn full_conversion_with_terminators_has_sparse_support() {
        let d = dd(&[(1, 24.0 / 25.0), (6, 1.0 / 25.0)], 1.0);
        let sd = size_distribution(&d, 400, Method::DirectConvolution).unwrap();
        for n in 1..=400 {
            let allowed = n == 2 || (n >= 7 && (n - 2) % 5 == 0);
            if allowed {
                assert!(sd.w(n) > 0.0, "n={n}");
            } else {
                assert_eq!(sd.w(n), 0.0, "n={n}");
            }
        }
    }

    #[test]
    fn transform_backends_clamp_structural_zeros() {
        let d = dd(&[(1, 24.0 / 25.0), (6, 1.0 / 25.0)], 1.0);
        let opts = SizeOptions {
            refine_below_floor: false,
        };
        for method in [Method::PerSizeFft, Method::SeriesInversion] {
            let sd = size_distribution_with(&d, 300, method, opts).unwrap();
            assert!(!sd.unreliable().is_empty());
            for n in 3..=300 {
                if (n - 2) % 5 != 0 {
                    assert_eq!(sd.w(n), 0.0);
                }
            }
            let refined = size_distribution(&d, 300, method).unwrap();
            assert!(refined.unreliable().is_empty());
            assert_eq!(refined.refined().len(), sd.unreliable().len());
        }
    }

    #[test]
    fn degenerate_inputs() {
        let d = dd(&[(3, 1.0)], 0.0);
        let sd = size_distribution(&d, 10, Method::SeriesInversion).unwrap();
        assert_eq!(sd.w(1), 1.0);
        assert_eq!(sd.mass(), 1.0);

        let d = dd(&[(3, 1.0)], 1.0);
        let sd = size_distribution(&d, 10, Method::SeriesInversion).unwrap();
        assert_eq!(sd.mass(), 0.0);

        let d = dd(&[(1, 1.0)], 0.7);
        for method in Method::ALL {
            let sd = size_distribution(&d, 10, method).unwrap();
            assert!((sd.w(1) - 0.3).abs() < 1e-15);
            assert!((sd.w(2) - 0.7).abs() < 1e-15);
            assert_eq!(sd.w(3), 0.0);
            assert_eq!(sd.truncation_deficit(), 0.0);
        }
        assert!(size_distribution(&d, 0, Method::SeriesInversion).is_err());
    }

    #[test]
    fn cross_check_passes_on_a_mixture() {
        let d = dd(&[(1, 0.1), (2, 0.4), (5, 0.5)], 0.33);
        cross_check(&d, 256).unwrap();
    }

    #[test]
    fn method_names_parse() {
        assert_eq!("fft".parse::<Method>().unwrap(), Method::PerSizeFft);
        assert_eq!("direct".parse::<Method>().unwrap(), Method::DirectConvolution);
        assert_eq!("newton".parse::<Method>().unwrap(), Method::SeriesInversion);
        assert!("spline".parse::<Method>().is_err());
    }
}
