//! Uncertainty-informed push sampling.
//!
//! Pipeline per step: distance map over uncertain cells, target cells,
//! visibility corridors from each target to the shelf front, the front-most
//! occluder of the best corridor, pushing sectors around that occluder and
//! finally sampled push candidates whose effect is forecast on the belief.

mod config;
mod corridor;
mod distance;
mod forward;
mod raster;
mod sample;
mod sector;
mod segment;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub use config::PushConfig;
pub use corridor::{
    best_corridor, cluster_rays, front_rays, score_corridor, select_occluder, visibility_corridors,
    FrontRay, VisibilityCorridor,
};
pub use distance::{select_target_locations, squared_edt, uncertainty_distance_map};
pub use forward::{
    adopt_push_forecast, cap_beta, cap_lambdas, push_forward_belief, push_forward_segment,
    swept_cells, temper, transfer_weights,
};
pub use raster::{line_cells, walk};
pub use sample::{random_push_candidates, sample_push_candidates};
pub use sector::{pushing_corridor, segment_extent, PushSector};
pub use segment::{Segment, Segmentation};

use crate::belief::BeliefState;
use crate::error::Result;
use crate::rng::{derive_indexed, Stream};
use crate::view::{greedy_nbv, ActionBoxes, NbvConfig, VigEvaluator};

/// A planar push: the pusher starts at `start` and drives the first object
/// it meets `length` meters along `direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushCandidate {
    /// World `(x, y)` in meters.
    pub start: Vector2<f64>,
    pub direction: Vector2<f64>,
    /// Translation of the pushed object, meters.
    pub length: f64,
    /// Belief segment the push is aimed at.
    pub target_object: u32,
    pub predicted_vig: f64,
}

/// Belief-derived 2D maps shared by every stage of one planning step.
pub struct PushContext {
    pub rows: usize,
    pub cols: usize,
    pub resolution: f64,
    pub origin: [f64; 2],
    pub seg: Segmentation,
    /// Column occupancy probability.
    pub occ: Vec<f64>,
    /// Normalized column `u_o` in `[0, 1]`.
    pub u_o: Vec<f64>,
    pub u_s: Vec<f64>,
    pub maps: crate::belief::UncertaintyMaps,
    pub sem_floor: f64,
    pub start_max_occupancy: f64,
}

impl PushContext {
    pub fn new(belief: &BeliefState, cfg: &PushConfig) -> Self {
        let g = belief.grid();
        let maps = belief.uncertainty_maps();
        PushContext {
            rows: g.rows,
            cols: g.cols,
            resolution: g.resolution,
            origin: [g.origin[0], g.origin[1]],
            seg: Segmentation::from_belief(belief),
            occ: belief.occupancy_map(),
            u_o: maps.u_o_normalized(),
            u_s: maps.u_s.clone(),
            maps,
            sem_floor: cfg.sem_uncertainty_floor,
            start_max_occupancy: cfg.start_max_occupancy,
        }
    }

    /// True when a pusher can be placed at continuous cell coordinates `p`:
    /// inside the grid, outside every segment and on believed-free ground.
    pub fn start_clear(&self, p: [f64; 2]) -> bool {
        if !(p[0] >= 0.0 && p[1] >= 0.0 && p[0] < self.cols as f64 && p[1] < self.rows as f64) {
            return false;
        }
        let (r, c) = (p[1] as usize, p[0] as usize);
        self.seg.id_at(r, c).is_none() && self.occ[r * self.cols + c] < self.start_max_occupancy
    }

    /// World point of continuous cell coordinates.
    pub fn to_world(&self, p: [f64; 2]) -> Vector2<f64> {
        Vector2::new(
            self.origin[0] + p[0] * self.resolution,
            self.origin[1] + p[1] * self.resolution,
        )
    }
}

/// What the informed pipeline saw on its way to the candidates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PushTelemetry {
    pub targets: Vec<usize>,
    /// Best corridor score per target.
    pub corridor_scores: Vec<f64>,
    /// Selected occluder per target.
    pub occluders: Vec<Option<u32>>,
    /// Sector indices per distinct occluder, best first.
    pub sector_ranks: Vec<(u32, Vec<usize>)>,
    pub diagnostics: Vec<String>,
}

/// Runs the informed pipeline and returns unscored candidates.
pub fn informed_candidates(
    ctx: &PushContext,
    cfg: &PushConfig,
    seed: u64,
    step: u64,
) -> Result<(Vec<PushCandidate>, PushTelemetry)> {
    let mut tel = PushTelemetry::default();
    let dmap = uncertainty_distance_map(&ctx.maps, cfg);
    tel.targets = select_target_locations(&dmap, ctx.cols, cfg);
    let mut occluders: Vec<u32> = Vec::new();
    for &t in &tel.targets {
        let corridors = visibility_corridors(ctx, t, cfg);
        tel.corridor_scores
            .push(best_corridor(&corridors).map_or(0.0, |i| corridors[i].score));
        let occ = select_occluder(&corridors);
        tel.occluders.push(occ);
        if let Some(o) = occ {
            if !occluders.contains(&o) {
                occluders.push(o);
            }
        }
    }
    let mut candidates = Vec::new();
    for &o in &occluders {
        let sectors = pushing_corridor(ctx, o, cfg)?;
        tel.sector_ranks
            .push((o, sectors.iter().map(|s| s.index).collect()));
        let mut rng = derive_indexed(seed, step, Stream::PushSampling, o as u64);
        let (mut c, diag) = sample_push_candidates(ctx, o, &sectors[0], cfg, &mut rng)?;
        candidates.append(&mut c);
        tel.diagnostics.extend(diag);
    }
    Ok((candidates, tel))
}

/// Best-view VIG on the forecast belief after `push`.
#[allow(clippy::too_many_arguments)]
pub fn push_vig(
    belief: &BeliefState,
    seg: &Segmentation,
    push: &PushCandidate,
    cfg: &PushConfig,
    boxes: &ActionBoxes,
    nbv: &NbvConfig,
    evaluator: &mut VigEvaluator,
    rng: &mut crate::rng::Rng,
) -> Result<f64> {
    let segment = seg
        .get(push.target_object)
        .ok_or(crate::Error::Segmentation(push.target_object))?;
    let forecast = push_forward_segment(belief, segment, push, cfg);
    Ok(greedy_nbv(&forecast, boxes, nbv, evaluator, rng)?.vig)
}

/// Scores every candidate with its post-push VIG and returns the index of
/// the best one (first on ties).
#[allow(clippy::too_many_arguments)]
pub fn score_candidates(
    belief: &BeliefState,
    ctx: &PushContext,
    candidates: &mut [PushCandidate],
    boxes: &ActionBoxes,
    cfg: &PushConfig,
    nbv: &NbvConfig,
    evaluator: &mut VigEvaluator,
    seed: u64,
    step: u64,
) -> Result<Option<usize>> {
    let small = NbvConfig {
        n_candidates: cfg.push_vig_candidates,
        ..*nbv
    };
    let mut best: Option<usize> = None;
    for i in 0..candidates.len() {
        let mut rng = derive_indexed(seed, step, Stream::PushVig, i as u64);
        let v = push_vig(
            belief,
            &ctx.seg,
            &candidates[i],
            cfg,
            boxes,
            &small,
            evaluator,
            &mut rng,
        )?;
        candidates[i].predicted_vig = v;
        if best.map_or(true, |b| v > candidates[b].predicted_vig) {
            best = Some(i);
        }
    }
    Ok(best)
}
