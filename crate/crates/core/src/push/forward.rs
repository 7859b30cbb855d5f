//! Kinematic forecast of the belief after a push.
//!
//! The target segment's evidence (every voxel of its columns plus its
//! Dirichlet counts) is translated by the push and bilinearly spread over
//! the destination cells. Cells the object vacates or sweeps through are
//! predicted free with confident miss evidence and a prior class belief.
//! Destination cells blend the moved evidence with what was there in
//! proportion to the coverage they receive.
//!
//! That kinematic forecast is what push candidates are scored on. The belief
//! the planner adopts after executing a push is additionally tempered near
//! the push: neighbors may have been shoved along, so occupied evidence is
//! capped to what a single view can overturn and free space goes back to
//! unknown.

use std::collections::BTreeMap;

use super::config::PushConfig;
use super::raster::walk;
use super::segment::{Segment, Segmentation};
use super::PushCandidate;
use crate::belief::{BeliefState, BetaParams};
use crate::error::{Error, Result};

/// Kinematic forecast of `belief` after `push`.
pub fn push_forward_belief(
    belief: &BeliefState,
    push: &PushCandidate,
    cfg: &PushConfig,
) -> Result<BeliefState> {
    if push.length == 0.0 {
        return Ok(belief.clone());
    }
    let seg = Segmentation::from_belief(belief);
    let segment = seg
        .get(push.target_object)
        .ok_or(Error::Segmentation(push.target_object))?;
    Ok(push_forward_segment(belief, segment, push, cfg))
}

/// The belief adopted after executing `push`: the kinematic forecast,
/// tempered around everything the push touched.
pub fn adopt_push_forecast(
    belief: &BeliefState,
    push: &PushCandidate,
    cfg: &PushConfig,
) -> Result<BeliefState> {
    let seg = Segmentation::from_belief(belief);
    let segment = seg
        .get(push.target_object)
        .ok_or(Error::Segmentation(push.target_object))?;
    let mut out = push_forward_segment(belief, segment, push, cfg);
    let g = *belief.grid();
    if let Some((dest, swept)) = displacement(segment, push, &g) {
        let mut touched = segment.cells.clone();
        touched.extend(swept);
        touched.extend(dest.keys());
        temper(
            &mut out,
            &dilate(&touched, cfg.forecast_margin, g.rows, g.cols),
            cfg,
        );
    }
    Ok(out)
}

/// Caps occupied evidence and forgets free evidence in `cells`.
pub fn temper(belief: &mut BeliefState, cells: &[usize], cfg: &PushConfig) {
    let g = *belief.grid();
    for &c in cells {
        for v in g.column(c) {
            let p = belief.voxel(v);
            *belief.voxel_mut(v) = if p.alpha > p.beta {
                cap_beta(p, cfg.forecast_occupancy_strength)
            } else {
                BetaParams::default()
            };
        }
        cap_lambdas(belief.cell_lambdas_mut(c), cfg.forecast_semantic_strength);
    }
}

/// Destination weights for each source cell of a translated segment.
pub fn transfer_weights(
    segment: &Segment,
    shift: [f64; 2],
    rows: usize,
    cols: usize,
) -> BTreeMap<usize, Vec<(usize, f64)>> {
    let mut dest: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &src in &segment.cells {
        let fx = (src % cols) as f64 + shift[0];
        let fy = (src / cols) as f64 + shift[1];
        let (x0, y0) = (fx.floor(), fy.floor());
        let (wx, wy) = (fx - x0, fy - y0);
        for (dx, dy, w) in [
            (0.0, 0.0, (1.0 - wx) * (1.0 - wy)),
            (1.0, 0.0, wx * (1.0 - wy)),
            (0.0, 1.0, (1.0 - wx) * wy),
            (1.0, 1.0, wx * wy),
        ] {
            if w <= 0.0 {
                continue;
            }
            let (x, y) = (x0 + dx, y0 + dy);
            if x < 0.0 || y < 0.0 || x >= cols as f64 || y >= rows as f64 {
                continue;
            }
            let cell = y as usize * cols + x as usize;
            dest.entry(cell).or_default().push((src, w));
        }
    }
    dest
}

/// Cells crossed by the segment between its source and destination.
pub fn swept_cells(segment: &Segment, shift: [f64; 2], rows: usize, cols: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for &src in &segment.cells {
        let from = [(src % cols) as f64 + 0.5, (src / cols) as f64 + 0.5];
        let to = [from[0] + shift[0], from[1] + shift[1]];
        walk(from, to, rows, cols, |r, c, _| {
            out.push(r * cols + c);
            true
        });
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Shrinks evidence above the prior so that `alpha + beta <= cap`.
pub fn cap_beta(p: BetaParams, cap: f64) -> BetaParams {
    let s = p.alpha + p.beta;
    if s <= cap {
        return p;
    }
    let k = (cap - 2.0) / (s - 2.0);
    BetaParams {
        alpha: 1.0 + (p.alpha - 1.0) * k,
        beta: 1.0 + (p.beta - 1.0) * k,
    }
}

/// Shrinks evidence above the unit prior so that the strength is at most `cap`.
pub fn cap_lambdas(lambdas: &mut [f64], cap: f64) {
    let n = lambdas.len() as f64;
    let s: f64 = lambdas.iter().sum();
    if s <= cap || cap <= n {
        return;
    }
    let k = (cap - n) / (s - n);
    for l in lambdas {
        *l = 1.0 + (*l - 1.0) * k;
    }
}

/// Cells within `radius` (Chebyshev) of any cell in `cells`.
fn dilate(cells: &[usize], radius: usize, rows: usize, cols: usize) -> Vec<usize> {
    let mut mark = vec![false; rows * cols];
    for &c in cells {
        let (r, q) = (c / cols, c % cols);
        for rr in r.saturating_sub(radius)..(r + radius + 1).min(rows) {
            for cc in q.saturating_sub(radius)..(q + radius + 1).min(cols) {
                mark[rr * cols + cc] = true;
            }
        }
    }
    (0..rows * cols).filter(|&c| mark[c]).collect()
}

type Transfer = BTreeMap<usize, Vec<(usize, f64)>>;

/// Destination weights and swept cells of a push, or `None` for a null push.
fn displacement(
    segment: &Segment,
    push: &PushCandidate,
    g: &crate::grid::GridSpec,
) -> Option<(Transfer, Vec<usize>)> {
    let norm = push.direction.norm();
    if push.length == 0.0 || !(norm > 0.0) {
        return None;
    }
    let scale = push.length / g.resolution / norm;
    let shift = [push.direction.x * scale, push.direction.y * scale];
    Some((
        transfer_weights(segment, shift, g.rows, g.cols),
        swept_cells(segment, shift, g.rows, g.cols),
    ))
}

pub fn push_forward_segment(
    belief: &BeliefState,
    segment: &Segment,
    push: &PushCandidate,
    cfg: &PushConfig,
) -> BeliefState {
    let g = *belief.grid();
    let Some((dest, swept)) = displacement(segment, push, &g) else {
        return belief.clone();
    };
    let mut out = belief.clone();
    let layers = g.layers;
    let vacated = BetaParams {
        alpha: 1.0,
        beta: 1.0 + cfg.forecast_free_evidence,
    };
    for &c in segment.cells.iter().chain(&swept) {
        out.reset_cell(c);
        for v in g.column(c) {
            *out.voxel_mut(v) = vacated;
        }
    }
    let n_classes = belief.n_classes();
    let mut lambdas = vec![0.0; n_classes];
    for (&cell, sources) in &dest {
        let total: f64 = sources.iter().map(|(_, w)| w).sum::<f64>().min(1.0);
        let keep = 1.0 - total;
        for k in 0..layers {
            let cur = out.voxel(cell * layers + k);
            let (mut a, mut b) = (keep * cur.alpha, keep * cur.beta);
            for &(src, w) in sources {
                let s = belief.voxel(src * layers + k);
                a += w * s.alpha;
                b += w * s.beta;
            }
            *out.voxel_mut(cell * layers + k) = BetaParams { alpha: a, beta: b };
        }
        for (n, l) in lambdas.iter_mut().enumerate() {
            *l = keep * out.cell_lambdas(cell)[n];
        }
        for &(src, w) in sources {
            for (l, s) in lambdas.iter_mut().zip(belief.cell_lambdas(src)) {
                *l += w * s;
            }
        }
        out.cell_lambdas_mut(cell).copy_from_slice(&lambdas);
    }
    out
}
