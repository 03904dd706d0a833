use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, Measurement};
use super::trial::{run_trial, TrialResult};
use crate::thresholds::{exact_p, report, Regime};
use crate::{Error, Result};

/// Per-point aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: usize,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub failures: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over trials whose recovery finished.
    pub mean_delta: Option<f64>,
    pub mean_minority_fraction: f64,
    /// Standard error of the per-trial minority fractions.
    pub minority_fraction_se: f64,
    pub both_label_minorities_rate: f64,
    /// `P(n - 1, n, p, q)`, the probability that a fixed node is a minority.
    pub exact_p: f64,
    pub exact_log_p: f64,
    pub sparse_stat: Option<f64>,
    pub dense_stat: Option<f64>,
    pub weak_stat: f64,
    pub regime: Regime,
    pub hypothesis_unmet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    /// Sorted by `(point, trial)`.
    pub rows: Vec<TrialResult>,
    pub summary: Vec<PointSummary>,
}

/// Runs every `(point, trial)` pair on a pool of `workers` threads (the
/// rayon default when `None` or zero). The rows, and so the summary, do not
/// depend on the worker count apart from wall times.
pub fn run_sweep(spec: &ExperimentSpec, workers: Option<usize>) -> Result<SweepOutput> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let total = spec.grid.len() * spec.trials;
    let rows: Vec<TrialResult> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| run_trial(spec, i / spec.trials, i % spec.trials))
            .collect()
    });
    let summary = summarize(spec, &rows)?;
    Ok(SweepOutput { rows, summary })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Aggregates rows into per-point summaries. A pure function of its inputs,
/// so it can be re-run on rows read back from disk.
pub fn summarize(spec: &ExperimentSpec, rows: &[TrialResult]) -> Result<Vec<PointSummary>> {
    spec.grid
        .iter()
        .enumerate()
        .map(|(point, grid)| {
            let params = grid.params()?;
            let mine: Vec<&TrialResult> = rows.iter().filter(|r| r.point == point).collect();
            let trials = mine.len();
            let successes = mine.iter().filter(|r| r.exact).count();
            let fractions: Vec<f64> = mine.iter().map(|r| r.minority_fraction).collect();
            let mean_fraction = mean(fractions.iter().copied()).unwrap_or(0.0);
            let se = if trials > 1 {
                let var = fractions.iter().map(|f| (f - mean_fraction).powi(2)).sum::<f64>()
                    / (trials - 1) as f64;
                (var / trials as f64).sqrt()
            } else {
                0.0
            };
            let n = params.n as u64;
            let crossing = exact_p(n.saturating_sub(1), n, params.p, params.q);
            let rep = report(n, params.p, params.q)?;
            Ok(PointSummary {
                point,
                n: params.n,
                p: params.p,
                q: params.q,
                trials,
                failures: mine.iter().filter(|r| r.error.is_some()).count(),
                successes,
                success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
                mean_delta: mean(mine.iter().filter_map(|r| r.delta)),
                mean_minority_fraction: mean_fraction,
                minority_fraction_se: se,
                both_label_minorities_rate: mean(
                    mine.iter().map(|r| f64::from(u8::from(r.both_label_minorities))),
                )
                .unwrap_or(0.0),
                exact_p: crossing.value,
                exact_log_p: crossing.log_value,
                sparse_stat: rep.sparse_stat,
                dense_stat: rep.dense_stat,
                weak_stat: rep.weak_stat,
                regime: rep.regime,
                hypothesis_unmet: rep.hypothesis_unmet,
            })
        })
        .collect()
}

/// Floats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn columns(m: Measurement) -> &'static [&'static str] {
    match m {
        Measurement::ExactRecovery => &["exact"],
        Measurement::Overlap => &["delta"],
        Measurement::MinorityStats => &[
            "minority_count",
            "minority_fraction",
            "v_epsilon_size",
            "replica_errors_in_v_epsilon",
        ],
        Measurement::BothLabelMinorities => &["both_label_minorities"],
        Measurement::StageErrors => &["spectral_errors", "replica_errors", "final_errors"],
        Measurement::NormEstimate => &["norm_estimate"],
        Measurement::Timing => &[
            "generate_seconds",
            "spectral_seconds",
            "replica_seconds",
            "final_seconds",
            "total_seconds",
        ],
    }
}

fn values(m: Measurement, r: &TrialResult) -> Vec<String> {
    match m {
        Measurement::ExactRecovery => vec![r.exact.to_string()],
        Measurement::Overlap => vec![opt(r.delta, fmt_f64)],
        Measurement::MinorityStats => vec![
            r.minority_count.to_string(),
            fmt_f64(r.minority_fraction),
            r.v_epsilon_size.to_string(),
            opt(r.replica_errors_in_v_epsilon, |b| b.to_string()),
        ],
        Measurement::BothLabelMinorities => vec![r.both_label_minorities.to_string()],
        Measurement::StageErrors => {
            let e = r.stage_errors;
            vec![
                opt(e.and_then(|e| e.spectral), |x| x.to_string()),
                opt(e.and_then(|e| e.replica), |x| x.to_string()),
                opt(e.and_then(|e| e.final_stage), |x| x.to_string()),
            ]
        }
        Measurement::NormEstimate => vec![opt(r.norm_estimate, fmt_f64)],
        Measurement::Timing => {
            let t = r.timings.unwrap_or_default();
            vec![
                fmt_f64(r.generate_seconds),
                fmt_f64(t.spectral),
                fmt_f64(t.replica),
                fmt_f64(t.final_stage),
                fmt_f64(t.total),
            ]
        }
    }
}

/// Row table: point fields, trial, seed, then the requested measurements in
/// canonical order, then the error message (empty on success).
pub fn write_rows_csv<W: Write>(spec: &ExperimentSpec, rows: &[TrialResult], out: W) -> Result<()> {
    let measurements = spec.measurement_set();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["point", "n", "p", "q", "trial", "seed"];
    for &m in &measurements {
        header.extend_from_slice(columns(m));
    }
    header.push("error");
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.point.to_string(),
            r.n.to_string(),
            fmt_f64(r.p),
            fmt_f64(r.q),
            r.trial.to_string(),
            r.seed.to_string(),
        ];
        for &m in &measurements {
            rec.extend(values(m, r));
        }
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(summary: &[PointSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "point",
        "n",
        "p",
        "q",
        "trials",
        "failures",
        "successes",
        "success_rate",
        "mean_delta",
        "mean_minority_fraction",
        "minority_fraction_se",
        "both_label_minorities_rate",
        "exact_p",
        "exact_log_p",
        "sparse_stat",
        "dense_stat",
        "weak_stat",
        "regime",
        "hypothesis_unmet",
    ])?;
    for s in summary {
        w.write_record([
            s.point.to_string(),
            s.n.to_string(),
            fmt_f64(s.p),
            fmt_f64(s.q),
            s.trials.to_string(),
            s.failures.to_string(),
            s.successes.to_string(),
            fmt_f64(s.success_rate),
            opt(s.mean_delta, fmt_f64),
            fmt_f64(s.mean_minority_fraction),
            fmt_f64(s.minority_fraction_se),
            fmt_f64(s.both_label_minorities_rate),
            fmt_f64(s.exact_p),
            fmt_f64(s.exact_log_p),
            opt(s.sparse_stat, fmt_f64),
            opt(s.dense_stat, fmt_f64),
            fmt_f64(s.weak_stat),
            serde_json::to_value(s.regime)?.as_str().unwrap_or_default().to_string(),
            s.hypothesis_unmet.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
