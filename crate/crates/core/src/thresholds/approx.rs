//! Closed-form approximations and bounds for binomial probabilities, each
//! meant to be checked against the exact log-space values.

use super::binomial::ln_pmf;
use crate::{Error, Result};

/// Normal-density approximation of `Pr(Y = k)` for `Y ~ Binom(n, q)`:
/// `phi((k - nq) / (sqrt(n) sigma_q)) / (sqrt(n) sigma_q)`.
///
/// `k` may be any real point, which is how the approximation is used over
/// unit cells around integers.
pub fn lclt_pmf(n: u64, q: f64, k: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "local CLT needs 0 < q < 1 (got {q})"
        )));
    }
    let scale = (n as f64 * q * (1.0 - q)).sqrt();
    let z = (k - n as f64 * q) / scale;
    Ok((-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * scale))
}

/// Log of [`poisson_sum_pmf`].
pub fn ln_poisson_sum_pmf(n: u64, a: f64, b: f64, k: u64) -> f64 {
    let rate = (a + b) * (n as f64).ln();
    -rate + k as f64 * rate.ln() - libm::lgamma(k as f64 + 1.0)
}

/// `n^{-c} (c ln n)^k / k!` with `c = a + b`: the Poisson approximation to
/// `Pr(X + Y = k)` where `X ~ Binom(n, a ln n / n)` and
/// `Y ~ Binom(n, b ln n / n)`.
pub fn poisson_sum_pmf(n: u64, a: f64, b: f64, k: u64) -> f64 {
    ln_poisson_sum_pmf(n, a, b, k).exp()
}

/// Exact `ln(Pr(X = k + ell) / Pr(X = k))` for `X ~ Binom(m, p)`.
pub fn exact_log_ratio(m: u64, p: f64, k: u64, ell: u64) -> f64 {
    if ell == 0 {
        return 0.0;
    }
    ln_pmf(m, p, k + ell) - ln_pmf(m, p, k)
}

fn check_ratio_args(m: u64, p: f64, k: u64, ell: u64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("ratio bound needs 0 < p < 1 (got {p})")));
    }
    if k.checked_add(ell).is_none_or(|top| top > m) {
        return Err(Error::InvalidParameter(format!(
            "k + ell = {k} + {ell} exceeds m = {m}"
        )));
    }
    Ok(())
}

/// Upper bound `ell ln(mp / (k+1)) + ell ln((m-k) / (m - mp))` on
/// [`exact_log_ratio`]. Valid for every `0 <= k`, `k + ell <= m`.
pub fn ratio_bound(m: u64, p: f64, k: u64, ell: u64) -> Result<f64> {
    check_ratio_args(m, p, k, ell)?;
    if ell == 0 {
        return Ok(0.0);
    }
    let (mf, kf, lf) = (m as f64, k as f64, ell as f64);
    Ok(lf * (mf * p / (kf + 1.0)).ln() + lf * ((mf - kf) / (mf - mf * p)).ln())
}

/// Sparse-regime bound `ell ln(mp / ell) + 2 ell`, for `mp <= 128 ln m`.
pub fn ratio_bound_sparse(m: u64, p: f64, k: u64, ell: u64) -> Result<f64> {
    check_ratio_args(m, p, k, ell)?;
    let mp = m as f64 * p;
    if m < 2 || mp > 128.0 * (m as f64).ln() {
        return Err(Error::InvalidParameter(format!(
            "sparse ratio bound needs mp <= 128 ln m (m = {m}, mp = {mp})"
        )));
    }
    if ell == 0 {
        return Ok(0.0);
    }
    let lf = ell as f64;
    Ok(lf * (mp / lf).ln() + 2.0 * lf)
}
