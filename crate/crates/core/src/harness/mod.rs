//! Seeded Monte Carlo experiments.
//!
//! Every trial's randomness is derived from `(master_seed, point, trial)`,
//! so a sweep is a pure function of its [`ExperimentSpec`] (wall times
//! aside), whatever the worker count.

mod calibrate;
mod spec;
mod sweep;
mod trial;

pub use calibrate::{
    calibrate_perturbation, default_grid, write_calibration_csv, CalibrationPoint, CalibrationRow,
    CalibrationTable,
};
pub use spec::{ExperimentSpec, GridPoint, Measurement, SEED_ENV};
pub use sweep::{fmt_f64, run_sweep, summarize, write_rows_csv, write_summary_csv, PointSummary, SweepOutput};
pub use trial::{run_trial, trial_seed, TrialResult};
