//! Pushing corridors: angular sectors around an occluder.

use serde::{Deserialize, Serialize};

use super::config::PushConfig;
use super::raster::walk;
use super::segment::Segment;
use super::PushContext;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushSector {
    pub index: usize,
    /// Unit direction of the sector bisector in `(x, y)`.
    pub direction: [f64; 2],
    /// Start and end angle in radians, counter-clockwise from `+x`.
    pub span: [f64; 2],
    pub mean_occupancy: f64,
    /// Free travel from the contour to the nearest obstacle or boundary, meters.
    pub clearance: f64,
    /// Shortest distance from the contour to the shelf boundary, meters.
    pub boundary_distance: f64,
    /// False when pushing this way would drive the object across the boundary.
    pub valid: bool,
}

/// Distance from `p` along `u` to where the ray leaves `[0, cols] x [0, rows]`.
pub(crate) fn distance_to_box(p: [f64; 2], u: [f64; 2], rows: usize, cols: usize) -> f64 {
    let hi = [cols as f64, rows as f64];
    let mut t = f64::INFINITY;
    for a in 0..2 {
        if u[a] > 1e-12 {
            t = t.min((hi[a] - p[a]) / u[a]);
        } else if u[a] < -1e-12 {
            t = t.min(-p[a] / u[a]);
        }
    }
    t.max(0.0)
}

/// Distance from the centroid along `u` to the first cell outside the segment.
pub(crate) fn contour_distance(ctx: &PushContext, seg: &Segment, u: [f64; 2]) -> f64 {
    let p = seg.centroid;
    let far = distance_to_box(p, u, ctx.rows, ctx.cols);
    let to = [p[0] + u[0] * far, p[1] + u[1] * far];
    let mut exit = far;
    walk(p, to, ctx.rows, ctx.cols, |r, c, t| {
        if ctx.seg.ids[r * ctx.cols + c] != Some(seg.id) {
            exit = t;
            false
        } else {
            true
        }
    });
    exit
}

/// Width of the segment measured along `u`, in cells.
pub fn segment_extent(seg: &Segment, cols: usize, u: [f64; 2]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &c in &seg.cells {
        let x = (c % cols) as f64 + 0.5;
        let y = (c / cols) as f64 + 0.5;
        let s = x * u[0] + y * u[1];
        lo = lo.min(s);
        hi = hi.max(s);
    }
    hi - lo + 1.0
}

struct RayStats {
    occ_sum: f64,
    n: usize,
    clearance: f64,
    boundary: f64,
}

fn cast(ctx: &PushContext, seg: &Segment, u: [f64; 2], reach: f64) -> RayStats {
    let p = seg.centroid;
    let exit = contour_distance(ctx, seg, u);
    let boundary = distance_to_box(p, u, ctx.rows, ctx.cols) - exit;
    let end = exit + reach;
    let to = [p[0] + u[0] * end, p[1] + u[1] * end];
    let mut stats = RayStats {
        occ_sum: 0.0,
        n: 0,
        clearance: reach.min(boundary),
        boundary,
    };
    let mut blocked = false;
    walk(p, to, ctx.rows, ctx.cols, |r, c, t| {
        if t < exit {
            return true;
        }
        let cell = r * ctx.cols + c;
        if ctx.seg.ids[cell] == Some(seg.id) {
            return true;
        }
        stats.occ_sum += ctx.occ[cell];
        stats.n += 1;
        // Anything not believed free stops the clearance, unknown space included.
        if !blocked && (ctx.seg.ids[cell].is_some() || ctx.occ[cell] >= ctx.start_max_occupancy) {
            blocked = true;
            stats.clearance = stats.clearance.min((t - exit).max(0.0));
        }
        true
    });
    stats
}

/// Evaluates every sector around `object` and ranks them: valid sectors
/// first, then by occupancy bucket ascending, clearance descending, index.
pub fn pushing_corridor(
    ctx: &PushContext,
    object: u32,
    cfg: &PushConfig,
) -> Result<Vec<PushSector>> {
    let seg = ctx.seg.get(object).ok_or(Error::Segmentation(object))?;
    let n_sectors = cfg.n_sectors();
    let width = cfg.sector_angle_deg.to_radians();
    let res = ctx.resolution;
    let mut sectors: Vec<PushSector> = (0..n_sectors)
        .map(|k| {
            let a0 = k as f64 * width;
            let a1 = a0 + width;
            let mid = 0.5 * (a0 + a1);
            let dir = [mid.cos(), mid.sin()];
            let (mut occ, mut n) = (0.0, 0usize);
            let mut clearance = f64::INFINITY;
            let mut boundary = f64::INFINITY;
            for i in 0..cfg.rays_per_sector {
                let a = a0 + (i as f64 + 0.5) / cfg.rays_per_sector as f64 * width;
                let s = cast(ctx, seg, [a.cos(), a.sin()], cfg.sector_reach);
                occ += s.occ_sum;
                n += s.n;
                clearance = clearance.min(s.clearance);
                boundary = boundary.min(s.boundary);
            }
            let travel = segment_extent(seg, ctx.cols, dir) + cfg.push_margin;
            PushSector {
                index: k,
                direction: dir,
                span: [a0, a1],
                mean_occupancy: if n > 0 { occ / n as f64 } else { 0.0 },
                clearance: clearance.max(0.0) * res,
                boundary_distance: boundary.max(0.0) * res,
                valid: boundary >= travel,
            }
        })
        .collect();
    // The tolerance keeps means that sit on a bucket edge from splitting on
    // rounding noise.
    let bucket =
        |s: &PushSector| (s.mean_occupancy / cfg.sector_occupancy_bucket + 1e-9).floor() as i64;
    sectors.sort_by(|a, b| {
        b.valid
            .cmp(&a.valid)
            .then(bucket(a).cmp(&bucket(b)))
            .then(b.clearance.total_cmp(&a.clearance))
            .then(a.index.cmp(&b.index))
    });
    Ok(sectors)
}
