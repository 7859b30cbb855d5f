//! Visibility corridors from a target cell to the shelf front.

use serde::{Deserialize, Serialize};

use super::config::PushConfig;
use super::raster::walk;
use super::PushContext;

/// Per-ray record before clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRay {
    /// Front column the ray ends at.
    pub col: usize,
    /// Segment ids crossed, front to back, without the target's own segment.
    pub occluders: Vec<u32>,
    /// Euclidean length in cells.
    pub length: f64,
    /// Cells traversed, target cell excluded.
    pub n_cells: usize,
    /// Sum of `u_o * occupancy` and of `u_o` over traversed cells.
    pub weighted_occ: f64,
    pub weight: f64,
    /// Traversed cells that are not confidently classified.
    pub n_unknown: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityCorridor {
    /// Front column of the first ray.
    pub start: usize,
    /// Number of merged rays.
    pub width: usize,
    /// Mean ray length divided by the map depth in cells.
    pub length: f64,
    pub occluders: Vec<u32>,
    /// Uncertainty-weighted mean occupancy over all traversed cells, already
    /// scaled by the fraction of those cells that are unknown.
    pub p_occ: f64,
    pub n_occ_obj: usize,
    pub score: f64,
}

/// `k1 w + k2 l + k3 p_occ + k4 n_occ_obj`.
pub fn score_corridor(c: &VisibilityCorridor, cfg: &PushConfig) -> f64 {
    let [k1, k2, k3, k4] = cfg.k;
    k1 * c.width as f64 + k2 * c.length + k3 * c.p_occ + k4 * c.n_occ_obj as f64
}

/// One ray per front column from the target cell center to the front edge.
pub fn front_rays(ctx: &PushContext, target: usize) -> Vec<FrontRay> {
    let (rows, cols) = (ctx.rows, ctx.cols);
    let (tr, tc) = (target / cols, target % cols);
    let own = ctx.seg.ids[target];
    let from = [tc as f64 + 0.5, tr as f64 + 0.5];
    (0..cols)
        .map(|x| {
            let to = [x as f64 + 0.5, 0.0];
            let mut back_to_front: Vec<u32> = Vec::new();
            let (mut n, mut wo, mut w, mut unk) = (0usize, 0.0, 0.0, 0usize);
            walk(from, to, rows, cols, |r, c, _| {
                let cell = r * cols + c;
                if cell == target {
                    return true;
                }
                n += 1;
                wo += ctx.u_o[cell] * ctx.occ[cell];
                w += ctx.u_o[cell];
                if ctx.u_s[cell] >= ctx.sem_floor {
                    unk += 1;
                }
                if let Some(id) = ctx.seg.ids[cell] {
                    if Some(id) != own && back_to_front.last() != Some(&id) {
                        back_to_front.push(id);
                    }
                }
                true
            });
            let mut occluders: Vec<u32> = Vec::with_capacity(back_to_front.len());
            for id in back_to_front.into_iter().rev() {
                if !occluders.contains(&id) {
                    occluders.push(id);
                }
            }
            FrontRay {
                col: x,
                occluders,
                length: (to[0] - from[0]).hypot(to[1] - from[1]),
                n_cells: n,
                weighted_occ: wo,
                weight: w,
                n_unknown: unk,
            }
        })
        .collect()
}

/// Merges adjacent rays with identical occluder sequences, at most `n_c`
/// rays per corridor, and scores the result.
pub fn cluster_rays(rays: &[FrontRay], rows: usize, cfg: &PushConfig) -> Vec<VisibilityCorridor> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < rays.len() {
        let mut j = i + 1;
        while j < rays.len() && j - i < cfg.n_c && rays[j].occluders == rays[i].occluders {
            j += 1;
        }
        let group = &rays[i..j];
        let width = group.len();
        let length = group.iter().map(|r| r.length).sum::<f64>() / width as f64 / rows as f64;
        let cells: usize = group.iter().map(|r| r.n_cells).sum();
        let weight: f64 = group.iter().map(|r| r.weight).sum();
        let weighted: f64 = group.iter().map(|r| r.weighted_occ).sum();
        let unknown: usize = group.iter().map(|r| r.n_unknown).sum();
        let mean_occ = if weight > 0.0 { weighted / weight } else { 0.0 };
        let unknown_frac = if cells > 0 {
            unknown as f64 / cells as f64
        } else {
            0.0
        };
        let occluders = group[0].occluders.clone();
        let mut c = VisibilityCorridor {
            start: group[0].col,
            width,
            length,
            n_occ_obj: occluders.len(),
            occluders,
            p_occ: mean_occ * unknown_frac,
            score: 0.0,
        };
        c.score = score_corridor(&c, cfg);
        out.push(c);
        i = j;
    }
    out
}

pub fn visibility_corridors(
    ctx: &PushContext,
    target: usize,
    cfg: &PushConfig,
) -> Vec<VisibilityCorridor> {
    cluster_rays(&front_rays(ctx, target), ctx.rows, cfg)
}

/// Index of the best corridor: highest score, then wider, then lower start.
pub fn best_corridor(corridors: &[VisibilityCorridor]) -> Option<usize> {
    (0..corridors.len()).min_by(|&a, &b| {
        let (ca, cb) = (&corridors[a], &corridors[b]);
        cb.score
            .total_cmp(&ca.score)
            .then(cb.width.cmp(&ca.width))
            .then(ca.start.cmp(&cb.start))
    })
}

/// Front-most occluder of the best corridor; `None` when that corridor is
/// already clear.
pub fn select_occluder(corridors: &[VisibilityCorridor]) -> Option<u32> {
    best_corridor(corridors).and_then(|i| corridors[i].occluders.first().copied())
}
