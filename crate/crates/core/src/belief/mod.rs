//! Evidential map belief: Beta occupancy voxels plus Dirichlet semantic cells.

mod io;
mod params;
mod state;

pub use io::{read_binary, write_binary, BeliefSnapshot, BINARY_MAGIC};
pub use params::{
    beta_mean, beta_variance, dirichlet_expectation, dirichlet_uncertainty, expectation,
    fuse_class, fuse_occupancy, fuse_semantic, hard_label, strength, uncertainty, BetaParams,
    DirichletParams, Evidence,
};
pub use state::{BeliefState, BeliefSummary, UncertaintyMaps, PRIOR_VARIANCE};
