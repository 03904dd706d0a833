use serde::{Deserialize, Serialize};

use super::binomial::{ln_pmf_vec, ln_sum_exp, ln_survival_vec};

/// A probability carried in log space. `value` is `exp(log_value)` and
/// underflows to zero long before `log_value` loses information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingProb {
    pub log_value: f64,
    pub value: f64,
}

impl CrossingProb {
    pub fn from_log(log_value: f64) -> Self {
        let log_value = log_value.min(0.0);
        CrossingProb {
            log_value,
            value: log_value.exp(),
        }
    }
}

/// `P(m, n, p, q) = Pr(Y >= X)` with `X ~ Binom(m, max{p, q})` and
/// `Y ~ Binom(n, min{p, q})`.
///
/// One pmf sweep for `X` and one suffix log-sum-exp sweep for the survival
/// function of `Y`, so the cost is `O(m + n)`.
pub fn exact_p(m: u64, n: u64, p: f64, q: f64) -> CrossingProb {
    perturbed_p(m, n, p, q, 0)
}

/// `Pr(Y >= X - ell)`, with `X`, `Y` as in [`exact_p`]. Negative `ell`
/// gives `Pr(Y >= X + |ell|)`. Nondecreasing in `ell`.
pub fn perturbed_p(m: u64, n: u64, p: f64, q: f64, ell: i64) -> CrossingProb {
    let hi = p.max(q);
    let lo = p.min(q);
    let ln_px = ln_pmf_vec(m, hi);
    let ln_sy = ln_survival_vec(n, lo);
    let ln_survival = |j: i64| -> f64 {
        if j <= 0 {
            0.0
        } else if j as u64 > n {
            f64::NEG_INFINITY
        } else {
            ln_sy[j as usize]
        }
    };
    let terms = ln_px
        .iter()
        .enumerate()
        .map(|(k, &lx)| lx + ln_survival(k as i64 - ell));
    CrossingProb::from_log(ln_sum_exp(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_zero_reduces_to_all_failures() {
        let got = exact_p(10, 10, 0.1, 0.0).value;
        assert!((got - 0.9f64.powi(10)).abs() < 1e-15);
        assert!((got - 0.3486784401).abs() < 1e-10);
    }

    #[test]
    fn fair_single_trials() {
        assert!((exact_p(1, 1, 0.5, 0.5).value - 0.75).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_table() {
        // 0.16 * 1 + 0.48 * 0.36 + 0.36 * 0.04
        assert!((exact_p(2, 2, 0.6, 0.2).value - 0.3472).abs() < 1e-14);
        // 0.16 * 1 + 0.48 * 1 + 0.36 * 0.36
        assert!((perturbed_p(2, 2, 0.6, 0.2, 1).value - 0.7696).abs() < 1e-14);
    }

    #[test]
    fn perturbation_edges() {
        assert_eq!(perturbed_p(7, 5, 0.4, 0.1, 0), exact_p(7, 5, 0.4, 0.1));
        for ell in 7..10 {
            assert!((perturbed_p(7, 5, 0.4, 0.1, ell).value - 1.0).abs() < 1e-14);
        }
        // Pr(Y >= X + 1) with Y <= 2 and X >= 0 on m = 0 trials: Pr(Y >= 1).
        let got = perturbed_p(0, 2, 0.3, 0.5, -1).value;
        assert!((got - (1.0 - 0.7f64.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn degenerate_anchors() {
        assert_eq!(exact_p(6, 6, 1.0, 1.0).value, 1.0);
        assert_eq!(exact_p(4, 4, 1.0, 0.0).value, 0.0);
        assert_eq!(exact_p(4, 4, 1.0, 0.0).log_value, f64::NEG_INFINITY);
        assert_eq!(exact_p(0, 0, 0.3, 0.2).value, 1.0);
    }

    #[test]
    fn symmetric_in_p_q() {
        assert_eq!(exact_p(9, 11, 0.3, 0.7), exact_p(9, 11, 0.7, 0.3));
    }

    #[test]
    fn tiny_probabilities_stay_finite_in_log_space() {
        let c = exact_p(5000, 5000, 0.5, 0.1);
        assert!(c.log_value.is_finite() && c.log_value < -700.0);
        assert_eq!(c.value, 0.0);
    }
}
