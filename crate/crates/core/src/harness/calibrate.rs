use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sweep::fmt_f64;
use crate::thresholds::{exact_p, perturbed_p};
use crate::{Error, Result};

/// One `(m, n, p, q, ell)` point. `p` is the larger probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub m: u64,
    pub n: u64,
    pub p: f64,
    pub q: f64,
    pub ell: u64,
}

impl CalibrationPoint {
    /// `mp >= 64 ln m` and `ell <= sqrt(mp ln m)`.
    pub fn hypothesis_met(&self) -> bool {
        let (m, hi) = (self.m as f64, self.p.max(self.q));
        let mp = m * hi;
        mp >= 64.0 * m.ln() && (self.ell as f64) <= (mp * m.ln()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub point: CalibrationPoint,
    pub exact_log_p: f64,
    pub perturbed_log_p: f64,
    /// `ln((perturbed - 2 m^-2)_+ / exact)`; `None` when the positive part
    /// is zero.
    pub log_excess: Option<f64>,
    /// `log_excess / (ell sqrt(ln m / (m p)))`, defined as 0 at `ell = 0`.
    pub ratio: Option<f64>,
    pub hypothesis_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
    /// Largest finite ratio over all rows.
    pub max_ratio: Option<f64>,
    /// Largest finite ratio over rows meeting the hypothesis.
    pub max_ratio_hypothesis_met: Option<f64>,
}

/// The default grid: `m = n in {2000, 10000}`, `p in {0.02, 0.1}`,
/// `q / p in {0.3, 0.6}`, `ell in {0, 1, 2, 4, ...}` up to `sqrt(mp ln m)`.
pub fn default_grid() -> Vec<CalibrationPoint> {
    let mut grid = Vec::new();
    for &m in &[2000u64, 10_000] {
        for &p in &[0.02, 0.1] {
            for &ratio in &[0.3, 0.6] {
                let cap = (m as f64 * p * (m as f64).ln()).sqrt();
                let ells = std::iter::once(0).chain(
                    std::iter::successors(Some(1u64), |e| Some(e * 2)).take_while(|&e| e as f64 <= cap),
                );
                for ell in ells {
                    grid.push(CalibrationPoint {
                        m,
                        n: m,
                        p,
                        q: p * ratio,
                        ell,
                    });
                }
            }
        }
    }
    grid
}

fn row(pt: CalibrationPoint) -> Result<CalibrationRow> {
    if pt.m < 2 || !(0.0..=1.0).contains(&pt.p) || !(0.0..=1.0).contains(&pt.q) || pt.p == 0.0 {
        return Err(Error::InvalidParameter(format!("bad calibration point {pt:?}")));
    }
    let exact = exact_p(pt.m, pt.n, pt.p, pt.q);
    let ell = i64::try_from(pt.ell).map_err(|_| Error::InvalidParameter("ell too large".into()))?;
    let perturbed = perturbed_p(pt.m, pt.n, pt.p, pt.q, ell);
    let m = pt.m as f64;
    let ln_slack = (2.0 / (m * m)).ln();
    let log_excess = (perturbed.log_value > ln_slack && exact.log_value.is_finite()).then(|| {
        perturbed.log_value + (-(ln_slack - perturbed.log_value).exp()).ln_1p() - exact.log_value
    });
    let ratio = if pt.ell == 0 {
        Some(0.0)
    } else {
        let scale = pt.ell as f64 * (m.ln() / (m * pt.p.max(pt.q))).sqrt();
        log_excess.map(|x| x / scale)
    };
    Ok(CalibrationRow {
        point: pt,
        exact_log_p: exact.log_value,
        perturbed_log_p: perturbed.log_value,
        log_excess,
        ratio,
        hypothesis_met: pt.hypothesis_met(),
    })
}

/// Empirical constant of the perturbation bound
/// `perturbed_P <= exp(C ell sqrt(ln m / (mp))) P + 2 m^-2` over a grid.
pub fn calibrate_perturbation(grid: &[CalibrationPoint]) -> Result<CalibrationTable> {
    let rows = grid.iter().map(|&pt| row(pt)).collect::<Result<Vec<_>>>()?;
    let max_of = |filter: &dyn Fn(&CalibrationRow) -> bool| {
        rows.iter()
            .filter(|r| filter(r))
            .filter_map(|r| r.ratio)
            .filter(|x| x.is_finite())
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    };
    Ok(CalibrationTable {
        max_ratio: max_of(&|_| true),
        max_ratio_hypothesis_met: max_of(&|r| r.hypothesis_met),
        rows,
    })
}

pub fn write_calibration_csv<W: Write>(table: &CalibrationTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "m",
        "n",
        "p",
        "q",
        "ell",
        "exact_log_p",
        "perturbed_log_p",
        "log_excess",
        "ratio",
        "hypothesis_met",
    ])?;
    for r in &table.rows {
        let pt = r.point;
        w.write_record([
            pt.m.to_string(),
            pt.n.to_string(),
            fmt_f64(pt.p),
            fmt_f64(pt.q),
            pt.ell.to_string(),
            fmt_f64(r.exact_log_p),
            fmt_f64(r.perturbed_log_p),
            r.log_excess.map(fmt_f64).unwrap_or_default(),
            r.ratio.map(fmt_f64).unwrap_or_default(),
            r.hypothesis_met.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
