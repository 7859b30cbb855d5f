use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::pose::ViewPose;
use crate::belief::{BeliefState, PRIOR_VARIANCE};
use crate::error::Result;

/// The last few views with the height map seen after each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewHistory {
    capacity: usize,
    entries: VecDeque<HistoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub pose: ViewPose,
    /// Normalized action in `[-1, 1]^6`.
    pub action: [f64; 6],
    /// Height map normalized by the interior height.
    pub height_map: Vec<f32>,
}

impl ViewHistory {
    pub fn new(capacity: usize) -> Self {
        ViewHistory {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }

    pub fn push(&mut self, entry: HistoryEntry) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }
}

/// Map and history channels of the agent observation, each map `rows x cols`
/// row-major in `f32`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedObservation {
    pub rows: usize,
    pub cols: usize,
    pub height: Vec<f32>,
    /// Hard labels divided by `n_classes - 1`.
    pub semantics: Vec<f32>,
    /// Column-max variance divided by the prior variance.
    pub u_o: Vec<f32>,
    /// `N / S`, already in `(0, 1]` since evidence only accumulates.
    pub u_s: Vec<f32>,
    /// `n_hist` height maps, oldest first, zero-filled when unused.
    pub past_heights: Vec<Vec<f32>>,
    pub past_actions: Vec<[f32; 6]>,
}

impl EnrichedObservation {
    /// An all-zero observation, as returned after an infeasible action.
    pub fn zeros(rows: usize, cols: usize, n_hist: usize) -> Self {
        let n = rows * cols;
        EnrichedObservation {
            rows,
            cols,
            height: vec![0.0; n],
            semantics: vec![0.0; n],
            u_o: vec![0.0; n],
            u_s: vec![0.0; n],
            past_heights: vec![vec![0.0; n]; n_hist],
            past_actions: vec![[0.0; 6]; n_hist],
        }
    }

    /// Little-endian dump of every channel in declaration order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut put = |xs: &[f32]| {
            for x in xs {
                out.extend_from_slice(&x.to_le_bytes());
            }
        };
        put(&self.height);
        put(&self.semantics);
        put(&self.u_o);
        put(&self.u_s);
        for h in &self.past_heights {
            put(h);
        }
        for a in &self.past_actions {
            put(a);
        }
        out
    }
}

pub fn normalized_height_map(belief: &BeliefState, theta_occ: f64) -> Result<Vec<f32>> {
    let top = belief.grid().extent()[2];
    Ok(belief
        .height_map(theta_occ)?
        .into_iter()
        .map(|h| (h / top) as f32)
        .collect())
}

pub fn encode_observation(
    belief: &BeliefState,
    history: &ViewHistory,
    theta_occ: f64,
) -> Result<EnrichedObservation> {
    let g = belief.grid();
    let n = g.n_cells();
    let maps = belief.uncertainty_maps();
    let label_scale = (belief.n_classes() - 1) as f32;
    let mut past_heights = vec![vec![0.0f32; n]; history.capacity()];
    let mut past_actions = vec![[0.0f32; 6]; history.capacity()];
    for (i, e) in history.entries().enumerate() {
        past_heights[i].clone_from(&e.height_map);
        past_actions[i] = e.action.map(|x| x as f32);
    }
    Ok(EnrichedObservation {
        rows: g.rows,
        cols: g.cols,
        height: normalized_height_map(belief, theta_occ)?,
        semantics: belief
            .hard_labels()
            .into_iter()
            .map(|l| l as f32 / label_scale)
            .collect(),
        u_o: maps
            .u_o
            .iter()
            .map(|v| (v / PRIOR_VARIANCE).clamp(0.0, 1.0) as f32)
            .collect(),
        u_s: maps.u_s.iter().map(|v| v.min(1.0) as f32).collect(),
        past_heights,
        past_actions,
    })
}
