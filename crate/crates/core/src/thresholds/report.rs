use serde::{Deserialize, Serialize};

use super::criteria::{dense_criterion, sigma, sparse_criterion, weak_criterion};
use super::crossing::exact_p;
use crate::{Error, Result};

/// Density band that a parameter point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n max{p, q} <= 128 ln n`.
    Sparse,
    /// `n max{p, q} > 128 ln n`.
    Dense,
    /// `min{p, q} <= 1/3` and `max{p, q} >= 2/3`: exponentially easy.
    Trivial,
    /// `n < 3` or `p == q`: no criterion is meaningful.
    Degenerate,
}

/// Every consistency statistic for one `(n, p, q)` point. Serializes to a
/// flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: u64,
    pub p: f64,
    pub q: f64,
    /// `ln(n P(n, p, q))`.
    #[serde(rename = "exact_log_nP")]
    pub exact_log_np: f64,
    pub sparse_stat: Option<f64>,
    pub dense_stat: Option<f64>,
    pub weak_stat: f64,
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub regime: Regime,
    /// Dense band below the `n min{p, q} > ln^3 n` hypothesis of the dense
    /// characterization.
    pub hypothesis_unmet: bool,
}

pub fn regime(n: u64, p: f64, q: f64) -> Regime {
    let (lo, hi) = (p.min(q), p.max(q));
    if n < 3 || p == q {
        Regime::Degenerate
    } else if lo <= 1.0 / 3.0 && hi >= 2.0 / 3.0 {
        Regime::Trivial
    } else if n as f64 * hi <= 128.0 * (n as f64).ln() {
        Regime::Sparse
    } else {
        Regime::Dense
    }
}

pub fn report(n: u64, p: f64, q: f64) -> Result<ThresholdReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    for (name, x) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParameter(format!("{name} = {x} not in [0, 1]")));
        }
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let a = nf * p / ln_n;
    let b = nf * q / ln_n;
    let sparse_stat = if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 {
        sparse_criterion(a, b, n).ok()
    } else {
        None
    };
    let dense = dense_criterion(n, p, q);
    let regime = regime(n, p, q);
    Ok(ThresholdReport {
        n,
        p,
        q,
        exact_log_np: ln_n + exact_p(n, n, p, q).log_value,
        sparse_stat,
        dense_stat: (!dense.degenerate).then_some(dense.value),
        weak_stat: weak_criterion(n, p, q).unwrap_or(0.0),
        a,
        b,
        sigma: sigma(p, q),
        regime,
        hypothesis_unmet: regime == Regime::Dense && nf * p.min(q) <= ln_n.powi(3),
    })
}
