//! Grid geometry shared by the belief, the ground truth and the planners.
//!
//! World frame: `x` runs along the shelf front (width), `y` runs from the open
//! front face (`y = 0`) toward the back wall (depth), `z` points up from the
//! shelf board. A 2D cell is addressed by `(row, col)` with `row` along `y`
//! and `col` along `x`; voxels add a `layer` along `z`. Storage is row-major
//! over `(row, col, layer)`, so every height column is contiguous.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// H: cells along the shelf depth (`y`).
    pub rows: usize,
    /// W: cells along the shelf width (`x`).
    pub cols: usize,
    /// D: voxels along the height (`z`).
    pub layers: usize,
    /// Edge length of a cell/voxel in meters.
    pub resolution: f64,
    /// World position of the grid corner at `(row, col, layer) = (0, 0, 0)`.
    pub origin: [f64; 3],
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rows: 82,
            cols: 157,
            layers: 40,
            resolution: 0.005,
            origin: [0.0; 3],
        }
    }
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, layers: usize, resolution: f64) -> Result<Self> {
        let spec = GridSpec {
            rows,
            cols,
            layers,
            resolution,
            origin: [0.0; 3],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.layers == 0 {
            return Err(Error::config(
                "grid",
                "rows, cols and layers must be positive",
            ));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::config(
                "grid.resolution",
                "must be a positive length",
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn n_voxels(&self) -> usize {
        self.rows * self.cols * self.layers
    }

    #[inline]
    pub fn cell_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.cols, cell % self.cols)
    }

    #[inline]
    pub fn voxel_index(&self, row: usize, col: usize, layer: usize) -> usize {
        (row * self.cols + col) * self.layers + layer
    }

    /// `(row, col, layer)` of a flat voxel index.
    #[inline]
    pub fn voxel_coords(&self, voxel: usize) -> (usize, usize, usize) {
        let layer = voxel % self.layers;
        let cell = voxel / self.layers;
        (cell / self.cols, cell % self.cols, layer)
    }

    /// Footprint cell of a voxel.
    #[inline]
    pub fn voxel_cell(&self, voxel: usize) -> usize {
        voxel / self.layers
    }

    /// Voxel index range of a height column.
    #[inline]
    pub fn column(&self, cell: usize) -> std::ops::Range<usize> {
        cell * self.layers..(cell + 1) * self.layers
    }

    /// Shelf interior extent `(width, depth, height)` in meters.
    pub fn extent(&self) -> [f64; 3] {
        [
            self.cols as f64 * self.resolution,
            self.rows as f64 * self.resolution,
            self.layers as f64 * self.resolution,
        ]
    }

    /// World `(x, y)` of a cell center.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin[0] + (col as f64 + 0.5) * self.resolution,
            self.origin[1] + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// World height of a layer's center.
    pub fn layer_center(&self, layer: usize) -> f64 {
        self.origin[2] + (layer as f64 + 0.5) * self.resolution
    }

    /// Cell containing world point `(x, y)`, if inside the footprint.
    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin[0]) / self.resolution;
        let fy = (y - self.origin[1]) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (col, row) = (fx as usize, fy as usize);
        (row < self.rows && col < self.cols).then_some((row, col))
    }

    /// Voxel containing a world point, if inside the grid.
    pub fn world_to_voxel(&self, p: [f64; 3]) -> Option<usize> {
        let (row, col) = self.world_to_cell(p[0], p[1])?;
        let fz = (p[2] - self.origin[2]) / self.resolution;
        if fz < 0.0 {
            return None;
        }
        let layer = fz as usize;
        (layer < self.layers).then(|| self.voxel_index(row, col, layer))
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.layers == other.layers
    }
}
