use serde::{Deserialize, Serialize};

use super::binomial::ln_normal_upper_tail;
use crate::{Error, Result};

/// `(a + b - 2 sqrt(ab) - 1) ln n + (1/2) ln ln n` for the log-scaled
/// parametrization `p = a ln n / n`, `q = b ln n / n`. Exact recovery is
/// possible iff this diverges to `+inf` along the sequence.
pub fn sparse_criterion(a: f64, b: f64, n: u64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sparse criterion needs a, b > 0 (got a = {a}, b = {b})"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "sparse criterion needs n >= 3 (got {n})"
        )));
    }
    let ln_n = (n as f64).ln();
    Ok((a + b - 2.0 * (a * b).sqrt() - 1.0) * ln_n + 0.5 * ln_n.ln())
}

/// Dense-regime statistic and its Gaussian-tail companion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseCriterion {
    /// `(sqrt(n) sigma / |p - q|) exp(-n (p - q)^2 / (2 sigma^2))`.
    pub value: f64,
    pub log_value: f64,
    /// `n Pr(N(0,1) >= sqrt(n) |p - q| / sigma)`.
    pub gaussian_tail: f64,
    pub log_gaussian_tail: f64,
    /// Set when `p == q`; the values are then `+inf`.
    pub degenerate: bool,
}

/// `sigma_n = sqrt(p(1-p) + q(1-q))`.
pub fn sigma(p: f64, q: f64) -> f64 {
    (p * (1.0 - p) + q * (1.0 - q)).sqrt()
}

/// Dense-regime criterion: exact recovery is possible iff the value tends
/// to zero. Defined through `|p - q|`, so both senses are accepted.
pub fn dense_criterion(n: u64, p: f64, q: f64) -> DenseCriterion {
    let gap = (p - q).abs();
    if gap == 0.0 {
        return DenseCriterion {
            value: f64::INFINITY,
            log_value: f64::INFINITY,
            gaussian_tail: f64::INFINITY,
            log_gaussian_tail: f64::INFINITY,
            degenerate: true,
        };
    }
    let nf = n as f64;
    let s = sigma(p, q);
    let log_value = (nf.sqrt() * s / gap).ln() - nf * gap * gap / (2.0 * s * s);
    let log_gaussian_tail = nf.ln() + ln_normal_upper_tail(nf.sqrt() * gap / s);
    DenseCriterion {
        value: log_value.exp(),
        log_value,
        gaussian_tail: log_gaussian_tail.exp(),
        log_gaussian_tail,
        degenerate: false,
    }
}

/// `n (p - q)^2 / (p + q)`; almost exact recovery is possible iff this
/// diverges.
pub fn weak_criterion(n: u64, p: f64, q: f64) -> Result<f64> {
    if (p + q).is_nan() || p + q <= 0.0 {
        return Err(Error::InvalidParameter(
            "weak criterion undefined for p = q = 0".into(),
        ));
    }
    Ok(n as f64 * (p - q) * (p - q) / (p + q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_equal_rates() {
        for &n in &[3u64, 100, 12345] {
            let ln_n = (n as f64).ln();
            let got = sparse_criterion(1.7, 1.7, n).unwrap();
            assert!((got - (-ln_n + 0.5 * ln_n.ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_reference_values() {
        assert!((sparse_criterion(9.0, 1.0, 100).unwrap() - 14.5791).abs() < 5e-5);
        // (3 - 2 sqrt 2 - 1) ln 100 + ln(ln 100) / 2, evaluated independently.
        assert!((sparse_criterion(2.0, 1.0, 100).unwrap() - -3.051_458_083).abs() < 1e-8);
    }

    #[test]
    fn sparse_errors() {
        assert!(sparse_criterion(0.0, 1.0, 100).is_err());
        assert!(sparse_criterion(1.0, -1.0, 100).is_err());
        assert!(sparse_criterion(2.0, 1.0, 2).is_err());
    }

    #[test]
    fn dense_reference_value() {
        let d = dense_criterion(100, 0.5, 0.3);
        // 10 * sqrt(0.46) / 0.2 * exp(-4 / 0.92), evaluated independently.
        assert!((d.value - 0.438_643_848).abs() < 1e-8, "{}", d.value);
        let swapped = dense_criterion(100, 0.3, 0.5);
        assert!((swapped.value - d.value).abs() < 1e-15);
        assert!(!d.degenerate);
    }

    #[test]
    fn dense_equal_rates_flagged() {
        let d = dense_criterion(100, 0.4, 0.4);
        assert!(d.degenerate);
        assert_eq!(d.value, f64::INFINITY);
    }

    #[test]
    fn dense_tail_forms_converge() {
        // n Pr(N >= z) = value / sqrt(2 pi) times the Mills-ratio factor
        // 1 + O(1/z^2).
        let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let mut last = f64::INFINITY;
        for &n in &[1_000u64, 10_000, 100_000] {
            let d = dense_criterion(n, 0.5, 0.4);
            let gap = (d.log_gaussian_tail - (d.log_value - half_ln_2pi)).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn weak_values() {
        assert!((weak_criterion(100, 0.5, 0.3).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(weak_criterion(100, 0.2, 0.2).unwrap(), 0.0);
        let one = weak_criterion(50, 0.3, 0.1).unwrap();
        assert!((weak_criterion(100, 0.3, 0.1).unwrap() - 2.0 * one).abs() < 1e-12);
        assert!(weak_criterion(10, 0.0, 0.0).is_err());
    }
}
