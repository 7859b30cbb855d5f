use nalgebra::Vector3;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::feasibility::feasibility;
use super::pose::{ActionBoxes, ViewPose};
use super::vig::{InfoMeasure, VigEvaluator};
use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sensor::{CameraModel, ThresholdedBelief};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NbvConfig {
    pub n_candidates: usize,
    /// Probability that a candidate looks at a high-`u_s` cell.
    pub target_bias: f64,
    /// Fraction of cells, by descending `u_s`, eligible as biased targets.
    pub top_fraction: f64,
    /// Ray grid used for VIG prediction (coarser than rendering).
    pub vig_rays: [usize; 2],
    pub measure: InfoMeasure,
    pub info_floor: f64,
    /// Sampling attempts per requested candidate before giving up.
    pub attempts_per_candidate: usize,
}

impl Default for NbvConfig {
    fn default() -> Self {
        NbvConfig {
            n_candidates: 64,
            target_bias: 0.5,
            top_fraction: 0.1,
            vig_rays: [24, 18],
            measure: InfoMeasure::Variance,
            info_floor: 1e-4,
            attempts_per_candidate: 20,
        }
    }
}

impl NbvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_candidates == 0 {
            return Err(Error::config("nbv.n_candidates", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.target_bias) {
            return Err(Error::config("nbv.target_bias", "must lie in [0, 1]"));
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::config("nbv.top_fraction", "must lie in (0, 1]"));
        }
        if self.vig_rays[0] < 8 || self.vig_rays[1] < 8 {
            return Err(Error::config("nbv.vig_rays", "need at least 8x8 rays"));
        }
        if !(self.info_floor >= 0.0) {
            return Err(Error::config("nbv.info_floor", "must be non-negative"));
        }
        if self.attempts_per_candidate == 0 {
            return Err(Error::config(
                "nbv.attempts_per_candidate",
                "must be at least 1",
            ));
        }
        Ok(())
    }

    pub fn evaluator(&self, cam: &CameraModel, theta_occ: f64) -> VigEvaluator {
        VigEvaluator::new(
            cam.with_rays(self.vig_rays[0], self.vig_rays[1]),
            self.measure,
            self.info_floor,
            theta_occ,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbvResult {
    pub pose: ViewPose,
    pub vig: f64,
    /// VIG of every evaluated candidate, in sampling order.
    pub candidate_vigs: Vec<f64>,
}

/// Cells among the top `fraction` by semantic uncertainty; ties go to the
/// lower index.
pub fn uncertain_cells(belief: &BeliefState, fraction: f64) -> Vec<usize> {
    let n = belief.grid().n_cells();
    let u: Vec<f64> = (0..n).map(|c| belief.cell_uncertainty(c)).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then(a.cmp(&b)));
    idx.truncate(((n as f64 * fraction).ceil() as usize).clamp(1, n));
    idx
}

fn sample_in(rng: &mut Rng, b: &super::pose::Aabb3) -> Vector3<f64> {
    b.lerp([
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    ])
}

/// Draws one feasible candidate view, biased toward uncertain cells.
fn sample_candidate(
    rng: &mut Rng,
    belief: &BeliefState,
    boxes: &ActionBoxes,
    hot: &[usize],
    cfg: &NbvConfig,
    theta_occ: f64,
) -> Option<ViewPose> {
    let query = ThresholdedBelief {
        belief,
        threshold: theta_occ,
    };
    let g = belief.grid();
    let tb = &boxes.target;
    for _ in 0..cfg.attempts_per_candidate {
        let cam = sample_in(rng, &boxes.cam);
        let target = if !hot.is_empty() && rng.gen::<f64>() < cfg.target_bias {
            let cell = hot[rng.gen_range(0..hot.len())];
            let (row, col) = g.cell_coords(cell);
            let (x, y) = g.cell_center(row, col);
            let clamp =
                |v: f64, a: usize| v.clamp(tb.center[a] - tb.half[a], tb.center[a] + tb.half[a]);
            Vector3::new(
                clamp(x, 0),
                clamp(y, 1),
                tb.center.z + rng.gen_range(-1.0..=1.0) * tb.half.z,
            )
        } else {
            sample_in(rng, tb)
        };
        let pose = ViewPose::new(cam, target);
        if feasibility(&pose, boxes, &query) {
            return Some(pose);
        }
    }
    None
}

/// Samples `cfg.n_candidates` feasible views and returns the one with the
/// largest expected VIG (first on ties).
pub fn greedy_nbv(
    belief: &BeliefState,
    boxes: &ActionBoxes,
    cfg: &NbvConfig,
    evaluator: &mut VigEvaluator,
    rng: &mut Rng,
) -> Result<NbvResult> {
    let hot = if cfg.target_bias > 0.0 {
        uncertain_cells(belief, cfg.top_fraction)
    } else {
        Vec::new()
    };
    let mut best: Option<(ViewPose, f64)> = None;
    let mut candidate_vigs = Vec::with_capacity(cfg.n_candidates);
    for _ in 0..cfg.n_candidates {
        let Some(pose) = sample_candidate(rng, belief, boxes, &hot, cfg, evaluator.theta_occ)
        else {
            continue;
        };
        let vig = evaluator.expected_vig(belief, &pose);
        candidate_vigs.push(vig);
        if best.map_or(true, |(_, b)| vig > b) {
            best = Some((pose, vig));
        }
    }
    let (pose, vig) = best.ok_or_else(|| Error::Planning("no feasible view candidate".into()))?;
    debug_assert!(candidate_vigs.iter().all(|v| *v <= vig));
    Ok(NbvResult {
        pose,
        vig,
        candidate_vigs,
    })
}

/// A uniformly random feasible view.
pub fn random_view(
    belief: &BeliefState,
    boxes: &ActionBoxes,
    cfg: &NbvConfig,
    theta_occ: f64,
    rng: &mut Rng,
) -> Result<ViewPose> {
    let uniform = NbvConfig {
        target_bias: 0.0,
        attempts_per_candidate: cfg.attempts_per_candidate * cfg.n_candidates.max(1),
        ..*cfg
    };
    sample_candidate(rng, belief, boxes, &[], &uniform, theta_occ)
        .ok_or_else(|| Error::Planning("no feasible random view".into()))
}
