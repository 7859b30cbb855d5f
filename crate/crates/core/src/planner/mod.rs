//! View/push arbitration and the episode loop.
//!
//! Each step the planner finds the best view and, when pushing is enabled
//! and the map is not yet certain, the best push. A view wins iff
//! `VIG_nbv * delta_view > VIG_push`. Steps are logged as JSON lines so a run
//! can be replayed and checked action by action.

mod episode;
mod log;
mod replay;

use serde::{Deserialize, Serialize};

pub use episode::{
    run_episode, run_episode_with_policy, Decision, EpisodeRun, Planner, SimState, StepEffect,
    StepTiming,
};
pub use log::{
    scene_digest, sha256_hex, EpisodeEnd, EpisodeHeader, EpisodeLog, LogLine, LoggedAction,
    RewardTerms, StepMetrics, StepRecord, Terminal, LOG_FORMAT, LOG_VERSION,
};
pub use replay::{replay_episode, ReplayReport, REPLAY_TOLERANCE};

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::push::PushConfig;
use crate::scene::DynamicsConfig;
use crate::sensor::{CameraModel, FusionWeights};
use crate::view::{ActionBoxes, NbvConfig, RewardConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub delta_view: f64,
    pub action_budget: usize,
    pub completion_certainty: f64,
    /// Stop the episode as soon as a push makes something fall.
    pub tof_enabled: bool,
    /// Column `u_o` below which a cell counts as certain in occupancy.
    pub occupancy_certainty_floor: f64,
    pub theta_occ: f64,
    pub n_hist: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            delta_view: 2.0,
            action_budget: 40,
            completion_certainty: 0.99,
            tof_enabled: false,
            occupancy_certainty_floor: 0.01,
            theta_occ: 0.87,
            n_hist: 4,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_view >= 1.0 && self.delta_view.is_finite()) {
            return Err(Error::config("planner.delta_view", "must be at least 1"));
        }
        if self.action_budget == 0 {
            return Err(Error::config("planner.action_budget", "must be at least 1"));
        }
        if !(self.completion_certainty > 0.0 && self.completion_certainty < 1.0) {
            return Err(Error::config(
                "planner.completion_certainty",
                "must lie in (0, 1)",
            ));
        }
        if !(self.occupancy_certainty_floor > 0.0 && self.occupancy_certainty_floor.is_finite()) {
            return Err(Error::config(
                "planner.occupancy_certainty_floor",
                "must be positive",
            ));
        }
        if !(self.theta_occ > 0.0 && self.theta_occ < 1.0) {
            return Err(Error::config("planner.theta_occ", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    InformedPush,
    RandomPush,
    ViewOnly,
    RandomView,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::InformedPush,
        Method::RandomPush,
        Method::ViewOnly,
        Method::RandomView,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::InformedPush => "informed-push",
            Method::RandomPush => "random-push",
            Method::ViewOnly => "view-only",
            Method::RandomView => "random-view",
        }
    }

    pub fn pushes(&self) -> bool {
        matches!(self, Method::InformedPush | Method::RandomPush)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config("method", format!("unknown method `{s}`")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything an episode needs besides the scene and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodeSettings {
    pub grid: GridSpec,
    pub n_classes: usize,
    pub camera: CameraModel,
    pub fusion: FusionWeights,
    /// Probability that a rendered hit reports a wrong class.
    pub class_noise: f64,
    pub nbv: NbvConfig,
    pub push: PushConfig,
    pub reward: RewardConfig,
    pub dynamics: DynamicsConfig,
    pub planner: PlannerConfig,
    /// Defaults to boxes sized for the scene's shelf.
    pub boxes: Option<ActionBoxes>,
}

impl Default for EpisodeSettings {
    fn default() -> Self {
        EpisodeSettings {
            grid: GridSpec::default(),
            n_classes: 12,
            camera: CameraModel::default(),
            fusion: FusionWeights::default(),
            class_noise: 0.0,
            nbv: NbvConfig::default(),
            push: PushConfig::default(),
            reward: RewardConfig::default(),
            dynamics: DynamicsConfig::default(),
            planner: PlannerConfig::default(),
            boxes: None,
        }
    }
}

impl EpisodeSettings {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.n_classes < 2 {
            return Err(Error::config("n_classes", "need at least 2 classes"));
        }
        self.camera.validate()?;
        self.fusion.validate()?;
        if !(0.0..=1.0).contains(&self.class_noise) {
            return Err(Error::config("class_noise", "must lie in [0, 1]"));
        }
        self.nbv.validate()?;
        self.push.validate()?;
        if self.push.forecast_semantic_strength <= self.n_classes as f64 {
            return Err(Error::config(
                "push.forecast_semantic_strength",
                "must exceed the number of classes",
            ));
        }
        self.reward.validate()?;
        self.dynamics.validate()?;
        self.planner.validate()?;
        if let Some(b) = &self.boxes {
            b.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    View,
    Push,
}

/// The view wins iff `vig_nbv * delta_view > vig_push`; with no push on
/// offer it always wins.
pub fn arbitrate(vig_nbv: f64, vig_push: Option<f64>, delta_view: f64) -> ActionKind {
    match vig_push {
        Some(p) if !(vig_nbv * delta_view > p) => ActionKind::Push,
        _ => ActionKind::View,
    }
}

/// Fraction of cells that are certain in both channels: `u_s` below
/// `sem_floor` and column `u_o` below `occ_floor`.
pub fn map_certainty(belief: &BeliefState, sem_floor: f64, occ_floor: f64) -> f64 {
    let n = belief.grid().n_cells();
    let certain = (0..n)
        .filter(|&c| {
            belief.cell_uncertainty(c) < sem_floor && belief.column_variance(c) < occ_floor
        })
        .count();
    certain as f64 / n as f64
}
