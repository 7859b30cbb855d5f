//! Manipulation-enhanced mapping for cluttered shelves.
//!
//! The crate keeps an evidential belief over a shelf (Beta occupancy voxels and
//! Dirichlet semantic cells), simulates a depth/semantic camera and quasi-static
//! pushes, and plans between viewing and pushing by comparing expected
//! volumetric information gain.
//!
//! Module map:
//! - [`belief`]: evidential parameters, conjugate fusion, uncertainty maps.
//! - [`scene`]: procedural shelf worlds, ground truth and push dynamics.
//! - [`sensor`]: camera model, voxel traversal, rendering and fusion.
//! - [`view`]: action normalization, observation encoding, rewards, VIG, NBV.
//! - [`push`]: target selection, corridors, push sampling and forecasting.
//! - [`planner`]: view/push arbitration and the episode loop.
//! - [`metrics`]: mIoU, batch aggregation and method comparison.

pub mod belief;
pub mod clock;
pub mod config;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod pgm;
pub mod planner;
pub mod push;
pub mod rng;
pub mod scene;
pub mod sensor;
pub mod view;

pub use error::{Error, Result};
pub use grid::GridSpec;

/// Semantic class index reserved for free space.
pub const FREE_CLASS: u16 = 0;
