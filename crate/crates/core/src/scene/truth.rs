//! Rasterized ground truth on the belief grid.

use super::Scene;
use crate::grid::GridSpec;
use crate::FREE_CLASS;

/// Ground-truth occupancy and semantics on a grid.
///
/// A cell belongs to an object when the cell center lies strictly inside the
/// object's footprint; a voxel is occupied when its cell belongs to an object
/// and the voxel center lies below the object's top.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub grid: GridSpec,
    pub occupied: Vec<bool>,
    pub labels: Vec<u16>,
    /// Object covering each cell.
    pub owners: Vec<Option<u32>>,
    /// Number of occupied layers per cell.
    pub column_heights: Vec<usize>,
}

impl GroundTruth {
    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|o| **o).count()
    }

    pub fn height_map(&self) -> Vec<f64> {
        self.column_heights
            .iter()
            .map(|&k| k as f64 * self.grid.resolution)
            .collect()
    }

    /// Cells covered by one object.
    pub fn object_cells(&self, id: u32) -> Vec<usize> {
        self.owners
            .iter()
            .enumerate()
            .filter_map(|(c, o)| (*o == Some(id)).then_some(c))
            .collect()
    }
}

pub fn ground_truth_maps(scene: &Scene, grid: &GridSpec) -> GroundTruth {
    let n_cells = grid.n_cells();
    let mut labels = vec![FREE_CLASS; n_cells];
    let mut owners = vec![None; n_cells];
    let mut column_heights = vec![0usize; n_cells];
    let res = grid.resolution;

    for obj in scene.standing() {
        let fp = obj.footprint();
        let (lo, hi) = fp.aabb();
        let c0 = (((lo.x - grid.origin[0]) / res).floor().max(0.0)) as usize;
        let r0 = (((lo.y - grid.origin[1]) / res).floor().max(0.0)) as usize;
        let c1 = (((hi.x - grid.origin[0]) / res).ceil().max(0.0) as usize).min(grid.cols);
        let r1 = (((hi.y - grid.origin[1]) / res).ceil().max(0.0) as usize).min(grid.rows);
        let top = obj.height - grid.origin[2];
        let layers = (0..grid.layers)
            .take_while(|&k| (k as f64 + 0.5) * res < top)
            .count();
        for row in r0..r1 {
            for col in c0..c1 {
                let (x, y) = grid.cell_center(row, col);
                if !fp.contains(nalgebra::Vector2::new(x, y)) {
                    continue;
                }
                let cell = grid.cell_index(row, col);
                // Footprints never overlap, but keep the tallest if they do.
                if layers >= column_heights[cell] {
                    column_heights[cell] = layers;
                    labels[cell] = obj.class;
                    owners[cell] = Some(obj.id);
                }
            }
        }
    }

    let mut occupied = vec![false; grid.n_voxels()];
    for (cell, &h) in column_heights.iter().enumerate() {
        let base = cell * grid.layers;
        occupied[base..base + h].fill(true);
    }

    GroundTruth {
        grid: *grid,
        occupied,
        labels,
        owners,
        column_heights,
    }
}
