//! Push candidate sampling.

use nalgebra::Vector2;
use rand::Rng as _;

use super::config::PushConfig;
use super::sector::{contour_distance, segment_extent, PushSector};
use super::{PushCandidate, PushContext};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Candidate pushes through `sector`, started from the mirrored wedge
/// behind the object. Returns the candidates plus a diagnostic when fewer
/// than `n_p` could be placed.
pub fn sample_push_candidates(
    ctx: &PushContext,
    object: u32,
    sector: &PushSector,
    cfg: &PushConfig,
    rng: &mut Rng,
) -> Result<(Vec<PushCandidate>, Option<String>)> {
    let seg = ctx.seg.get(object).ok_or(Error::Segmentation(object))?;
    if !sector.valid {
        return Ok((
            Vec::new(),
            Some(format!("object {object}: no valid pushing sector")),
        ));
    }
    if cfg.start_band < 1.0 {
        return Ok((
            Vec::new(),
            Some(format!("object {object}: start region below one cell")),
        ));
    }
    let [a0, a1] = sector.span;
    let d0 = [a0.cos(), a0.sin()];
    let d1 = [a1.cos(), a1.sin()];
    let c = seg.centroid;
    let mut out = Vec::with_capacity(cfg.n_p);
    let attempts = 20 * cfg.n_p;
    for _ in 0..attempts {
        if out.len() == cfg.n_p {
            break;
        }
        let s: f64 = rng.gen();
        let band: f64 = rng.gen();
        let a = a0 + s * (a1 - a0);
        let u = [a.cos(), a.sin()];
        let back = [-u[0], -u[1]];
        let t = contour_distance(ctx, seg, back) + cfg.start_margin + band * cfg.start_band;
        let p = [c[0] + back[0] * t, c[1] + back[1] * t];
        if !ctx.start_clear(p) {
            continue;
        }
        let blend = Vector2::new((1.0 - s) * d0[0] + s * d1[0], (1.0 - s) * d0[1] + s * d1[1]);
        let dir = blend.normalize();
        let extent = segment_extent(seg, ctx.cols, [dir.x, dir.y]);
        let room = (sector.clearance / ctx.resolution - 1.0).max(cfg.min_push);
        out.push(PushCandidate {
            start: ctx.to_world(p),
            direction: dir,
            length: (extent + cfg.push_margin).min(room) * ctx.resolution,
            target_object: object,
            predicted_vig: 0.0,
        });
    }
    let diag = (out.len() < cfg.n_p).then(|| {
        format!(
            "object {object}: placed {} of {} push starts",
            out.len(),
            cfg.n_p
        )
    });
    Ok((out, diag))
}

/// Baseline pushes: uniformly random segment, direction and length.
pub fn random_push_candidates(
    ctx: &PushContext,
    cfg: &PushConfig,
    rng: &mut Rng,
) -> Vec<PushCandidate> {
    let mut out = Vec::with_capacity(cfg.random_candidates);
    if ctx.seg.segments.is_empty() {
        return out;
    }
    for _ in 0..20 * cfg.random_candidates {
        if out.len() == cfg.random_candidates {
            break;
        }
        let seg = &ctx.seg.segments[rng.gen_range(0..ctx.seg.segments.len())];
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let length = rng.gen_range(cfg.random_length[0]..=cfg.random_length[1]);
        let band: f64 = rng.gen();
        let u = [a.cos(), a.sin()];
        let back = [-u[0], -u[1]];
        let t = contour_distance(ctx, seg, back) + cfg.start_margin + band * cfg.start_band;
        let p = [seg.centroid[0] + back[0] * t, seg.centroid[1] + back[1] * t];
        if !ctx.start_clear(p) {
            continue;
        }
        out.push(PushCandidate {
            start: ctx.to_world(p),
            direction: Vector2::new(u[0], u[1]),
            length,
            target_object: seg.id,
            predicted_vig: 0.0,
        });
    }
    out
}
