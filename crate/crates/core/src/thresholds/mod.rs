//! The crossing probability `P(m, n, p, q) = Pr(Y >= X)`, the explicit
//! consistency criteria, and approximations validated against exact values.
//!
//! Everything here works in natural-log space; `P` is routinely far below
//! the smallest positive double.

mod approx;
pub mod binomial;
mod criteria;
mod crossing;
mod report;

pub use approx::{
    exact_log_ratio, lclt_pmf, ln_poisson_sum_pmf, poisson_sum_pmf, ratio_bound,
    ratio_bound_sparse,
};
pub use criteria::{dense_criterion, sigma, sparse_criterion, weak_criterion, DenseCriterion};
pub use crossing::{exact_p, perturbed_p, CrossingProb};
pub use report::{regime, report, Regime, ThresholdReport};
