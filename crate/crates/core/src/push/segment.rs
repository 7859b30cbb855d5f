//! Object instances in the belief: 4-connected regions of equal hard label.

use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::FREE_CLASS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: u32,
    pub label: u16,
    pub cells: Vec<usize>,
    /// Mean of cell centers in continuous cell coordinates `(x, y)`, where
    /// cell `(row, col)` is centered at `(col + 0.5, row + 0.5)`.
    pub centroid: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub rows: usize,
    pub cols: usize,
    /// Segment id per cell; `None` for free cells.
    pub ids: Vec<Option<u32>>,
    pub segments: Vec<Segment>,
}

impl Segmentation {
    pub fn from_labels(labels: &[u16], rows: usize, cols: usize) -> Self {
        assert_eq!(labels.len(), rows * cols);
        let mut ids = vec![None; labels.len()];
        let mut segments = Vec::new();
        let mut stack = Vec::new();
        for start in 0..labels.len() {
            if labels[start] == FREE_CLASS || ids[start].is_some() {
                continue;
            }
            let id = segments.len() as u32;
            let label = labels[start];
            let mut cells = Vec::new();
            ids[start] = Some(id);
            stack.push(start);
            while let Some(c) = stack.pop() {
                cells.push(c);
                let (r, k) = (c / cols, c % cols);
                let mut visit = |n: usize| {
                    if ids[n].is_none() && labels[n] == label {
                        ids[n] = Some(id);
                        stack.push(n);
                    }
                };
                if r > 0 {
                    visit(c - cols);
                }
                if r + 1 < rows {
                    visit(c + cols);
                }
                if k > 0 {
                    visit(c - 1);
                }
                if k + 1 < cols {
                    visit(c + 1);
                }
            }
            cells.sort_unstable();
            let n = cells.len() as f64;
            let (sx, sy) = cells.iter().fold((0.0, 0.0), |(sx, sy), &c| {
                (sx + (c % cols) as f64 + 0.5, sy + (c / cols) as f64 + 0.5)
            });
            segments.push(Segment {
                id,
                label,
                cells,
                centroid: [sx / n, sy / n],
            });
        }
        Segmentation {
            rows,
            cols,
            ids,
            segments,
        }
    }

    pub fn from_belief(belief: &BeliefState) -> Self {
        let g = belief.grid();
        Self::from_labels(&belief.hard_labels(), g.rows, g.cols)
    }

    pub fn get(&self, id: u32) -> Option<&Segment> {
        self.segments.get(id as usize)
    }

    #[inline]
    pub fn id_at(&self, row: usize, col: usize) -> Option<u32> {
        self.ids[row * self.cols + col]
    }

    /// Segment under a continuous cell-coordinate point, if inside the grid.
    pub fn id_at_point(&self, x: f64, y: f64) -> Option<u32> {
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (c, r) = (x as usize, y as usize);
        if r >= self.rows || c >= self.cols {
            return None;
        }
        self.id_at(r, c)
    }
}
