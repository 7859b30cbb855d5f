//! Uncertainty-weighted distance map and target selection.

use super::config::PushConfig;
use crate::belief::UncertaintyMaps;

/// Squared Euclidean distance transform (Felzenszwalb-Huttenlocher) of a
/// `rows x cols` mask: distance in cells from each cell to the nearest `true`.
/// Returns `None` when the mask has no `true` cell.
pub fn squared_edt(mask: &[bool], rows: usize, cols: usize) -> Option<Vec<f64>> {
    assert_eq!(mask.len(), rows * cols);
    if !mask.iter().any(|m| *m) {
        return None;
    }
    let inf = 1e20;
    let mut d: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { inf }).collect();
    let n = rows.max(cols);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for c in 0..cols {
        for r in 0..rows {
            f[r] = d[r * cols + c];
        }
        edt_1d(&f[..rows], &mut out[..rows], &mut v, &mut z);
        for r in 0..rows {
            d[r * cols + c] = out[r];
        }
    }
    for r in 0..rows {
        f[..cols].copy_from_slice(&d[r * cols..(r + 1) * cols]);
        edt_1d(&f[..cols], &mut out[..cols], &mut v, &mut z);
        d[r * cols..(r + 1) * cols].copy_from_slice(&out[..cols]);
    }
    Some(d)
}

/// Lower envelope of parabolas rooted at `(q, f[q])`.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}

/// Distance (cells) to the nearest confidently classified cell, scaled by
/// each cell's normalized occupancy uncertainty. All zeros when no cell is
/// confident yet.
pub fn uncertainty_distance_map(maps: &UncertaintyMaps, cfg: &PushConfig) -> Vec<f64> {
    let mask: Vec<bool> = maps
        .u_s
        .iter()
        .map(|u| *u < cfg.sem_uncertainty_floor)
        .collect();
    let Some(d2) = squared_edt(&mask, maps.rows, maps.cols) else {
        return vec![0.0; maps.rows * maps.cols];
    };
    let u_o = maps.u_o_normalized();
    d2.iter().zip(&u_o).map(|(d, u)| d.sqrt() * u).collect()
}

/// Up to `max_targets` cells of highest value, greedily skipping cells closer
/// than `min_target_separation` to an earlier pick. Ties go to the lower index.
pub fn select_target_locations(dmap: &[f64], cols: usize, cfg: &PushConfig) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dmap.len()).filter(|&c| dmap[c] > 0.0).collect();
    order.sort_by(|&a, &b| dmap[b].total_cmp(&dmap[a]).then(a.cmp(&b)));
    let sep2 = cfg.min_target_separation * cfg.min_target_separation;
    let mut picked: Vec<usize> = Vec::with_capacity(cfg.max_targets);
    for c in order {
        if picked.len() == cfg.max_targets {
            break;
        }
        let (r, k) = ((c / cols) as f64, (c % cols) as f64);
        let clear = picked.iter().all(|&p| {
            let (pr, pk) = ((p / cols) as f64, (p % cols) as f64);
            (r - pr).powi(2) + (k - pk).powi(2) >= sep2
        });
        if clear {
            picked.push(c);
        }
    }
    picked
}
