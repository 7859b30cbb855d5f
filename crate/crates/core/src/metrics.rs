//! Evaluation metrics and method comparison.

use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::scene::GroundTruth;

/// Mean per-class IoU over every class present in either map. Classes absent
/// from both are skipped, which keeps the measure symmetric.
pub fn miou(pred: &[u16], gt: &[u16]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::Contract(format!(
            "label maps differ in size: {} vs {}",
            pred.len(),
            gt.len()
        )));
    }
    let n = pred
        .iter()
        .chain(gt)
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut inter = vec![0usize; n];
    let mut union = vec![0usize; n];
    for (&p, &g) in pred.iter().zip(gt) {
        if p == g {
            inter[p as usize] += 1;
            union[p as usize] += 1;
        } else {
            union[p as usize] += 1;
            union[g as usize] += 1;
        }
    }
    let ious: Vec<f64> = (0..n)
        .filter(|&c| union[c] > 0)
        .map(|c| inter[c] as f64 / union[c] as f64)
        .collect();
    if ious.is_empty() {
        return Ok(1.0);
    }
    Ok(ious.iter().sum::<f64>() / ious.len() as f64)
}

/// Binary mIoU over {free, occupied} voxels, with occupancy decided by
/// `mean >= theta_occ`.
pub fn occupancy_miou(belief: &BeliefState, gt: &GroundTruth, theta_occ: f64) -> Result<f64> {
    if !belief.grid().same_shape(&gt.grid) {
        return Err(Error::Contract(
            "belief and ground truth grids differ".into(),
        ));
    }
    let mut inter = [0usize; 2];
    let mut union = [0usize; 2];
    for (p, &g) in belief.occupancy().iter().zip(&gt.occupied) {
        let p = p.is_occupied(theta_occ) as usize;
        let g = g as usize;
        if p == g {
            inter[p] += 1;
            union[p] += 1;
        } else {
            union[0] += 1;
            union[1] += 1;
        }
    }
    let ious: Vec<f64> = (0..2)
        .filter(|&c| union[c] > 0)
        .map(|c| inter[c] as f64 / union[c] as f64)
        .collect();
    Ok(ious.iter().sum::<f64>() / ious.len() as f64)
}

pub fn semantic_miou(belief: &BeliefState, gt: &GroundTruth) -> Result<f64> {
    miou(&belief.hard_labels(), &gt.labels)
}

/// Final numbers of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub scene_seed: u64,
    pub method: String,
    pub occ_miou: f64,
    pub sem_miou: f64,
    /// Total displacement of all objects over the episode, meters.
    pub mad: f64,
    pub num_push: usize,
    /// Any push moved a non-target object or made something fall.
    pub collided: bool,
    pub fell: bool,
    pub steps: usize,
    pub terminal: String,
    #[serde(default)]
    pub view_times: Vec<f64>,
    #[serde(default)]
    pub push_times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Sample standard deviation; zero for a single value.
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return MeanStd {
                mean: 0.0,
                std: 0.0,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanStd { mean, std }
    }
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub method: String,
    pub n_scenes: usize,
    pub occ_miou: MeanStd,
    pub sem_miou: MeanStd,
    pub mad: MeanStd,
    pub num_push: MeanStd,
    /// Fraction of scenes with at least one collision.
    pub collision_rate: f64,
    pub fall_rate: f64,
    pub median_view_time: f64,
    pub median_push_time: f64,
}

pub fn aggregate_batch(runs: &[RunMetrics]) -> Result<BatchSummary> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Contract("cannot aggregate an empty batch".into()))?;
    let col = |f: fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let n = runs.len() as f64;
    let view_times: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.view_times.iter().copied())
        .collect();
    let push_times: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.push_times.iter().copied())
        .collect();
    Ok(BatchSummary {
        method: first.method.clone(),
        n_scenes: runs.len(),
        occ_miou: MeanStd::of(&col(|r| r.occ_miou)),
        sem_miou: MeanStd::of(&col(|r| r.sem_miou)),
        mad: MeanStd::of(&col(|r| r.mad)),
        num_push: MeanStd::of(&col(|r| r.num_push as f64)),
        collision_rate: runs.iter().filter(|r| r.collided).count() as f64 / n,
        fall_rate: runs.iter().filter(|r| r.fell).count() as f64 / n,
        median_view_time: median(&view_times),
        median_push_time: median(&push_times),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Scene seeds shared by every method.
    pub seeds: Vec<u64>,
    pub collision_definition: String,
    pub rows: Vec<BatchSummary>,
    /// Mean differences of each row against the first row.
    pub deltas: Vec<MethodDelta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDelta {
    pub method: String,
    pub occ_miou: f64,
    pub sem_miou: f64,
    pub mad: f64,
    pub num_push: f64,
    pub collision_rate: f64,
}

/// Builds the report from per-method runs. Every method must cover the same
/// scene seeds in the same order.
pub fn compare_methods(per_method: &[Vec<RunMetrics>]) -> Result<ComparisonReport> {
    let first = per_method
        .first()
        .ok_or_else(|| Error::Contract("no methods to compare".into()))?;
    let seeds: Vec<u64> = first.iter().map(|r| r.scene_seed).collect();
    for runs in per_method {
        let s: Vec<u64> = runs.iter().map(|r| r.scene_seed).collect();
        if s != seeds {
            return Err(Error::Contract(
                "methods were run on different scene seeds".into(),
            ));
        }
    }
    let rows = per_method
        .iter()
        .map(|r| aggregate_batch(r))
        .collect::<Result<Vec<_>>>()?;
    let base = &rows[0];
    let deltas = rows
        .iter()
        .map(|r| MethodDelta {
            method: r.method.clone(),
            occ_miou: r.occ_miou.mean - base.occ_miou.mean,
            sem_miou: r.sem_miou.mean - base.sem_miou.mean,
            mad: r.mad.mean - base.mad.mean,
            num_push: r.num_push.mean - base.num_push.mean,
            collision_rate: r.collision_rate - base.collision_rate,
        })
        .collect();
    Ok(ComparisonReport {
        seeds,
        collision_definition:
            "scene counts as colliding if any push moved a non-target object or caused a fall"
                .into(),
        rows,
        deltas,
    })
}

pub const CSV_HEADER: &str = "method,n_scenes,occ_miou_mean,occ_miou_std,sem_miou_mean,sem_miou_std,mad_mean,mad_std,num_push_mean,num_push_std,collision_rate,fall_rate,median_view_time_s,median_push_time_s";

pub fn summary_csv(rows: &[BatchSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.4},{:.4},{:.4},{:.4},{:.6},{:.6}\n",
            r.method,
            r.n_scenes,
            r.occ_miou.mean,
            r.occ_miou.std,
            r.sem_miou.mean,
            r.sem_miou.std,
            r.mad.mean,
            r.mad.std,
            r.num_push.mean,
            r.num_push.std,
            r.collision_rate,
            r.fall_rate,
            r.median_view_time,
            r.median_push_time,
        ));
    }
    out
}

pub const RUNS_CSV_HEADER: &str =
    "scene_seed,method,occ_miou,sem_miou,mad,num_push,collided,fell,steps,terminal";

pub fn runs_csv(runs: &[RunMetrics]) -> String {
    let mut out = String::from(RUNS_CSV_HEADER);
    out.push('\n');
    for r in runs {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{},{},{},{},{}\n",
            r.scene_seed,
            r.method,
            r.occ_miou,
            r.sem_miou,
            r.mad,
            r.num_push,
            r.collided,
            r.fell,
            r.steps,
            r.terminal
        ));
    }
    out
}
