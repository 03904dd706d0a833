use serde::{Deserialize, Serialize};

use crate::graph_model::ModelParams;
use crate::refine::ReplicaConfig;
use crate::{Error, Result};

/// Environment variable that replaces `master_seed` when set.
pub const SEED_ENV: &str = "BISECTLAB_SEED";

/// One grid point, either direct or log-scaled
/// (`p = a ln n / n`, `q = b ln n / n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridPoint {
    Direct { n: usize, p: f64, q: f64 },
    LogScaled { n: usize, a: f64, b: f64 },
}

impl GridPoint {
    pub fn params(&self) -> Result<ModelParams> {
        match *self {
            GridPoint::Direct { n, p, q } => ModelParams::new(n, p, q),
            GridPoint::LogScaled { n, a, b } => ModelParams::from_log_scaled(n, a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    ExactRecovery,
    Overlap,
    MinorityStats,
    BothLabelMinorities,
    StageErrors,
    NormEstimate,
    Timing,
}

impl Measurement {
    pub const ALL: [Measurement; 7] = [
        Measurement::ExactRecovery,
        Measurement::Overlap,
        Measurement::MinorityStats,
        Measurement::BothLabelMinorities,
        Measurement::StageErrors,
        Measurement::NormEstimate,
        Measurement::Timing,
    ];
}

fn default_epsilon() -> f64 {
    0.5
}

fn default_m() -> usize {
    10
}

fn default_measurements() -> Vec<Measurement> {
    vec![
        Measurement::ExactRecovery,
        Measurement::Overlap,
        Measurement::MinorityStats,
        Measurement::BothLabelMinorities,
        Measurement::StageErrors,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub grid: Vec<GridPoint>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub use_paper_m: bool,
    #[serde(default = "default_measurements")]
    pub measurements: Vec<Measurement>,
}

impl ExperimentSpec {
    pub fn new(grid: Vec<GridPoint>, trials: usize, master_seed: u64) -> Self {
        ExperimentSpec {
            grid,
            trials,
            master_seed,
            epsilon: default_epsilon(),
            m: default_m(),
            use_paper_m: false,
            measurements: default_measurements(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        for (i, point) in self.grid.iter().enumerate() {
            point.params().map_err(|e| {
                Error::InvalidParameter(format!("grid point {i}: {e}"))
            })?;
        }
        self.replica_config(0).validate()
    }

    /// Replaces `master_seed` from [`SEED_ENV`] when it is set. Returns
    /// whether an override happened.
    pub fn apply_seed_override(&mut self) -> Result<bool> {
        match std::env::var(SEED_ENV) {
            Ok(text) => {
                self.master_seed = text.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("{SEED_ENV} = {text:?} is not a u64"))
                })?;
                Ok(true)
            }
            Err(_) => Ok(false),
        }
    }

    /// Requested measurements, deduplicated, in canonical order.
    pub fn measurement_set(&self) -> Vec<Measurement> {
        Measurement::ALL
            .into_iter()
            .filter(|m| self.measurements.contains(m))
            .collect()
    }

    pub fn wants(&self, m: Measurement) -> bool {
        self.measurements.contains(&m)
    }

    pub fn replica_config(&self, seed: u64) -> ReplicaConfig {
        ReplicaConfig {
            m: self.m,
            epsilon: self.epsilon,
            seed,
            use_paper_m: self.use_paper_m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_point_kinds() {
        let spec = ExperimentSpec::from_json(
            r#"{"grid": [{"n": 10, "p": 0.5, "q": 0.1}, {"n": 300, "a": 8, "b": 0.5}],
                "trials": 3, "master_seed": 7, "measurements": ["overlap", "exact_recovery"]}"#,
        )
        .unwrap();
        assert!(matches!(spec.grid[0], GridPoint::Direct { n: 10, .. }));
        assert!(matches!(spec.grid[1], GridPoint::LogScaled { n: 300, .. }));
        assert_eq!(spec.m, 10);
        assert_eq!(
            spec.measurement_set(),
            vec![Measurement::ExactRecovery, Measurement::Overlap]
        );
        let p = spec.grid[1].params().unwrap();
        assert!((p.p - 8.0 * 300f64.ln() / 300.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ExperimentSpec::from_json(r#"{"grid": [], "trials": 1, "master_seed": 0}"#).is_err());
        assert!(ExperimentSpec::from_json(
            r#"{"grid": [{"n": 4, "p": 0.5, "q": 0.1}], "trials": 0, "master_seed": 0}"#
        )
        .is_err());
        assert!(ExperimentSpec::from_json(
            r#"{"grid": [{"n": 4, "p": 1.5, "q": 0.1}], "trials": 1, "master_seed": 0}"#
        )
        .is_err());
        assert!(ExperimentSpec::from_json(
            r#"{"grid": [{"n": 4, "p": 0.5, "q": 0.1}], "trials": 1, "master_seed": 0, "bogus": 1}"#
        )
        .is_err());
    }
}
