//! Small numerical helpers shared across modules.

use statrs::function::gamma::ln_gamma;

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Above this row index binomial coefficients are evaluated in log space.
pub const EXACT_BINOMIAL_LIMIT: u64 = 60;

/// Exact binomial coefficient for `n <= EXACT_BINOMIAL_LIMIT`.
pub fn binomial_exact(n: u64, k: u64) -> u64 {
    debug_assert!(n <= EXACT_BINOMIAL_LIMIT);
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // C(n, i+1) = C(n, i) * (n - i) / (i + 1) stays integral and below 2^64 for n <= 60.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

/// Natural log of the binomial coefficient C(n, k); `-inf` when k > n.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n <= EXACT_BINOMIAL_LIMIT {
        return (binomial_exact(n, k) as f64).ln();
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(5, 2), 10);
        assert_eq!(binomial_exact(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial_exact(3, 4), 0);
    }

    #[test]
    fn log_binomial_matches_exact_at_the_switch() {
        let exact = (binomial_exact(60, 17) as f64).ln();
        let via_gamma = ln_gamma(61.0) - ln_gamma(18.0) - ln_gamma(44.0);
        assert!((exact - via_gamma).abs() < 1e-11);
        assert!((ln_binomial(61, 1) - 61f64.ln()).abs() < 1e-12);
    }
}
