//! Planted bisection instances, compact graphs, labellings and majority
//! censuses.

mod census;
mod generate;
mod graph;
pub mod io;
mod labelling;

pub use census::{census, majority_margin, DensitySource, EdgeDensity, MajorityCensus};
pub use generate::{generate, ModelParams, PlantedInstance};
pub use graph::{complement, induced_subgraph, Graph};
pub use labelling::{overlap_error, Labelling, Sense};
