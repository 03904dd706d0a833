//! Planted bisection (two-block stochastic block model) toolkit.
//!
//! The crate is split along the pipeline:
//!
//! * [`graph_model`]: instance generation, compact graphs, labellings and
//!   majority censuses.
//! * [`thresholds`]: exact and asymptotic evaluation of the crossing
//!   probability `P(m, n, p, q) = Pr(Y >= X)` and the explicit consistency
//!   criteria built on it.
//! * [`spectral`]: power-iteration eigenpairs and the balanced spectral
//!   partitioner used as the weakly consistent starting point.
//! * [`refine`]: the replica accuracy boost and the single-pass majority
//!   relabel, composed into [`refine::recover`].
//! * [`oracles`]: brute-force MAP / minimum bisection and the minority swap
//!   check for small instances.
//! * [`harness`]: seeded Monte Carlo trials, sweeps and calibration tables.

pub mod error;
pub mod graph_model;
pub mod harness;
pub mod oracles;
pub mod refine;
pub mod seeds;
pub mod spectral;
pub mod thresholds;

pub use error::{Error, Result};
pub use graph_model::{
    census, complement, generate, induced_subgraph, majority_margin, overlap_error, EdgeDensity,
    Graph, Labelling, MajorityCensus, ModelParams, PlantedInstance, Sense,
};
