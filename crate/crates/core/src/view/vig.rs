use serde::{Deserialize, Serialize};

use super::pose::ViewPose;
use crate::belief::{BeliefState, BetaParams};
use crate::sensor::{CameraModel, ThresholdedBelief, VisibilityScratch};

/// Per-voxel residual information used by VIG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoMeasure {
    /// Beta variance.
    Variance,
    /// Binary Shannon entropy of the expected occupancy, in nats.
    Entropy,
}

impl InfoMeasure {
    #[inline]
    pub fn of(&self, p: BetaParams) -> f64 {
        match self {
            InfoMeasure::Variance => p.variance(),
            InfoMeasure::Entropy => {
                let m = p.mean();
                -(m * m.ln() + (1.0 - m) * (1.0 - m).ln())
            }
        }
    }
}

/// Occlusion-aware volumetric information gain over a belief.
#[derive(Debug, Clone)]
pub struct VigEvaluator {
    pub cam: CameraModel,
    pub measure: InfoMeasure,
    /// Voxels with less information than this contribute nothing.
    pub info_floor: f64,
    pub theta_occ: f64,
    scratch: VisibilityScratch,
}

impl VigEvaluator {
    pub fn new(cam: CameraModel, measure: InfoMeasure, info_floor: f64, theta_occ: f64) -> Self {
        VigEvaluator {
            cam,
            measure,
            info_floor,
            theta_occ,
            scratch: VisibilityScratch::default(),
        }
    }

    pub fn expected_vig(&mut self, belief: &BeliefState, pose: &ViewPose) -> f64 {
        let query = ThresholdedBelief {
            belief,
            threshold: self.theta_occ,
        };
        self.scratch.collect(&query, pose, &self.cam);
        let occ = belief.occupancy();
        self.scratch
            .visible
            .iter()
            .map(|&v| self.measure.of(occ[v as usize]))
            .filter(|i| *i >= self.info_floor)
            .sum()
    }

    /// Voxels seen by the last evaluation.
    pub fn last_visible(&self) -> &[u32] {
        &self.scratch.visible
    }
}

/// One-shot VIG of a single view.
pub fn expected_vig(
    belief: &BeliefState,
    pose: &ViewPose,
    cam: &CameraModel,
    measure: InfoMeasure,
    info_floor: f64,
    theta_occ: f64,
) -> f64 {
    VigEvaluator::new(*cam, measure, info_floor, theta_occ).expected_vig(belief, pose)
}
