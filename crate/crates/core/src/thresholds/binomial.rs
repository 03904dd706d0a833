//! Log-space binomial primitives.

/// `ln C(m, k)` via the log-gamma function.
pub fn ln_choose(m: u64, k: u64) -> f64 {
    debug_assert!(k <= m);
    libm::lgamma(m as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((m - k) as f64 + 1.0)
}

/// `ln Pr(X = k)` for `X ~ Binom(m, p)`; `-inf` outside the support.
///
/// The degenerate endpoints `p = 0` and `p = 1` use `0^0 = 1`.
pub fn ln_pmf(m: u64, p: f64, k: u64) -> f64 {
    if k > m {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == m { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(m, k) + k as f64 * p.ln() + (m - k) as f64 * (-p).ln_1p()
}

/// The whole log-pmf vector `k = 0..=m`.
pub fn ln_pmf_vec(m: u64, p: f64) -> Vec<f64> {
    (0..=m).map(|k| ln_pmf(m, p, k)).collect()
}

/// `ln(e^a + e^b)` without overflow; `-inf` is the identity.
#[inline]
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln sum_i e^{x_i}`, shifting by the maximum.
pub fn ln_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

/// Log survival function `S[k] = ln Pr(Y >= k)` for `k = 0..=n`, accumulated
/// from the far tail inward so small terms are summed first.
pub fn ln_survival_vec(n: u64, q: f64) -> Vec<f64> {
    let pmf = ln_pmf_vec(n, q);
    let mut out = vec![f64::NEG_INFINITY; pmf.len()];
    let mut acc = f64::NEG_INFINITY;
    for k in (0..pmf.len()).rev() {
        acc = ln_add_exp(acc, pmf[k]);
        out[k] = acc.min(0.0);
    }
    out
}

/// `ln Pr(Z >= z)` for a standard normal, accurate far into the upper tail.
pub fn ln_normal_upper_tail(z: f64) -> f64 {
    if z < 30.0 {
        (0.5 * libm::erfc(z / std::f64::consts::SQRT_2)).ln()
    } else {
        // Asymptotic series; the truncation error is below 1e-9 here.
        let z2 = z * z;
        -0.5 * z2 - (z * (2.0 * std::f64::consts::PI).sqrt()).ln()
            + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2)).ln()
    }
}
