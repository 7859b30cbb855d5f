use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PushConfig {
    /// Cells with `u_s` below this count as confidently classified.
    pub sem_uncertainty_floor: f64,
    pub max_targets: usize,
    /// Minimum distance between target cells, in cells.
    pub min_target_separation: f64,
    /// Corridor width cap in rays.
    pub n_c: usize,
    /// Push candidates per occluder.
    pub n_p: usize,
    pub sector_angle_deg: f64,
    /// Corridor score weights for width, length, occupancy, occluder count.
    pub k: [f64; 4],
    pub rays_per_sector: usize,
    /// How far past the contour sector rays look, in cells.
    pub sector_reach: f64,
    /// Gap between the contour and the start region, in cells.
    pub start_margin: f64,
    /// Depth of the start region, in cells.
    pub start_band: f64,
    /// A push may only start where column occupancy is below this.
    pub start_max_occupancy: f64,
    /// Candidates starting within this many cells of a failed push start
    /// are skipped.
    pub failed_start_radius: f64,
    /// Extra travel beyond the object's extent, in cells.
    pub push_margin: f64,
    /// Shortest informed push, in cells. Informed pushes otherwise stop one
    /// cell short of the sector clearance.
    pub min_push: f64,
    /// View candidates per push when predicting post-push VIG.
    pub push_vig_candidates: usize,
    /// Width of the occupancy buckets used to rank sectors.
    pub sector_occupancy_bucket: f64,
    /// Candidates drawn per step by the random baseline.
    pub random_candidates: usize,
    /// Push length range for the random baseline, meters.
    pub random_length: [f64; 2],
    /// Miss evidence the forecast credits to voxels the pushed object
    /// vacates or sweeps.
    pub forecast_free_evidence: f64,
    /// Largest `alpha + beta` of occupied voxels near an executed push.
    pub forecast_occupancy_strength: f64,
    /// Largest Dirichlet strength near an executed push.
    pub forecast_semantic_strength: f64,
    /// Radius in cells around an executed push where evidence is tempered.
    pub forecast_margin: usize,
}

impl Default for PushConfig {
    fn default() -> Self {
        PushConfig {
            sem_uncertainty_floor: 0.1,
            max_targets: 5,
            min_target_separation: 10.0,
            n_c: 8,
            n_p: 8,
            sector_angle_deg: 30.0,
            k: [2.0, 3.0, 4.0, 5.0],
            rays_per_sector: 7,
            sector_reach: 24.0,
            start_margin: 1.5,
            start_band: 4.0,
            start_max_occupancy: 0.35,
            failed_start_radius: 2.0,
            push_margin: 1.5,
            min_push: 2.0,
            push_vig_candidates: 8,
            sector_occupancy_bucket: 0.05,
            random_candidates: 40,
            random_length: [0.02, 0.15],
            forecast_free_evidence: 64.0,
            forecast_occupancy_strength: 34.0,
            forecast_semantic_strength: 62.0,
            forecast_margin: 4,
        }
    }
}

impl PushConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("push.sem_uncertainty_floor", self.sem_uncertainty_floor),
            ("push.min_target_separation", self.min_target_separation),
            ("push.sector_angle_deg", self.sector_angle_deg),
            ("push.sector_reach", self.sector_reach),
            ("push.start_band", self.start_band),
            ("push.sector_occupancy_bucket", self.sector_occupancy_bucket),
            ("push.forecast_free_evidence", self.forecast_free_evidence),
            ("push.min_push", self.min_push),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be positive"));
            }
        }
        for (name, v) in [
            ("push.start_margin", self.start_margin),
            ("push.push_margin", self.push_margin),
            ("push.failed_start_radius", self.failed_start_radius),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be non-negative"));
            }
        }
        let counts = [
            ("push.max_targets", self.max_targets),
            ("push.n_c", self.n_c),
            ("push.n_p", self.n_p),
            ("push.rays_per_sector", self.rays_per_sector),
            ("push.push_vig_candidates", self.push_vig_candidates),
            ("push.random_candidates", self.random_candidates),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::config(name, "must be at least 1"));
            }
        }
        if self.k.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::config("push.k", "weights must be positive"));
        }
        let n = 360.0 / self.sector_angle_deg;
        if self.sector_angle_deg > 180.0 || (n - n.round()).abs() > 1e-9 {
            return Err(Error::config(
                "push.sector_angle_deg",
                "must divide 360 evenly",
            ));
        }
        if !(self.start_max_occupancy > 0.0 && self.start_max_occupancy <= 1.0) {
            return Err(Error::config(
                "push.start_max_occupancy",
                "must lie in (0, 1]",
            ));
        }
        if !(self.random_length[0] > 0.0 && self.random_length[1] >= self.random_length[0]) {
            return Err(Error::config(
                "push.random_length",
                "must be a positive ordered range",
            ));
        }
        if !(self.forecast_occupancy_strength > 2.0 && self.forecast_occupancy_strength.is_finite())
        {
            return Err(Error::config(
                "push.forecast_occupancy_strength",
                "must exceed the prior strength 2",
            ));
        }
        if !(self.forecast_semantic_strength.is_finite() && self.forecast_semantic_strength > 0.0) {
            return Err(Error::config(
                "push.forecast_semantic_strength",
                "must be positive",
            ));
        }
        Ok(())
    }

    pub fn n_sectors(&self) -> usize {
        (360.0 / self.sector_angle_deg).round() as usize
    }
}
