//! Dense real polynomials: evaluation, FFT multiplication and truncated power-series arithmetic.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Below this product length schoolbook multiplication is faster than FFT.
const SCHOOLBOOK_LIMIT: usize = 64;

/// Evaluates `p(x)` and `p'(x)` for coefficients in increasing degree.
pub fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut slope = 0.0;
    for &c in coeffs.iter().rev() {
        slope = slope * x + value;
        value = value * x + c;
    }
    (value, slope)
}

/// Schoolbook product truncated to `len` coefficients.
pub fn mul_naive(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// FFT-backed polynomial multiplier with cached plans.
pub struct PolyMul {
    planner: FftPlanner<f64>,
}

impl Default for PolyMul {
    fn default() -> Self {
        Self::new()
    }
}

impl PolyMul {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    fn plans(&mut self, size: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        (
            self.planner.plan_fft_forward(size),
            self.planner.plan_fft_inverse(size),
        )
    }

    /// Forward transform of `a` zero-padded to `size`.
    pub fn forward(&mut self, a: &[f64], size: usize) -> Vec<Complex64> {
        let (fwd, _) = self.plans(size);
        let mut buf: Vec<Complex64> = a.iter().take(size).map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(size, Complex64::new(0.0, 0.0));
        fwd.process(&mut buf);
        buf
    }

    /// Inverse transform, returning the normalised real parts.
    pub fn inverse(&mut self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        let size = spectrum.len();
        let (_, inv) = self.plans(size);
        inv.process(&mut spectrum);
        let scale = 1.0 / size as f64;
        spectrum.into_iter().map(|z| z.re * scale).collect()
    }

    /// `a · b mod x^len`.
    pub fn mul(&mut self, a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
        let a = &a[..a.len().min(len)];
        let b = &b[..b.len().min(len)];
        if a.is_empty() || b.is_empty() {
            return vec![0.0; len];
        }
        if a.len().min(b.len()) <= SCHOOLBOOK_LIMIT || a.len() + b.len() <= 2 * SCHOOLBOOK_LIMIT {
            return mul_naive(a, b, len);
        }
        let size = (a.len() + b.len() - 1).next_power_of_two();
        let fa = self.forward(a, size);
        let fb = self.forward(b, size);
        let prod = fa.into_iter().zip(fb).map(|(x, y)| x * y).collect();
        let mut out = self.inverse(prod);
        out.resize(len, 0.0);
        out
    }

    /// Multiplicative inverse of the series `a mod x^len` by Newton iteration; needs `a[0] != 0`.
    pub fn inverse_series(&mut self, a: &[f64], len: usize) -> Vec<f64> {
        assert!(a[0] != 0.0, "series with zero constant term has no inverse");
        let mut g = vec![1.0 / a[0]];
        let mut k = 1;
        while k < len {
            k = (2 * k).min(len);
            // g <- g (2 - a g)
            let ag = self.mul(a, &g, k);
            let mut correction: Vec<f64> = ag.iter().map(|&v| -v).collect();
            correction[0] += 2.0;
            g = self.mul(&g, &correction, k);
        }
        g.truncate(len);
        g
    }
}
