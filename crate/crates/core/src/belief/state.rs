use serde::{Deserialize, Serialize};

use super::params::{self, BetaParams, Evidence};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Beta variance at the unit prior, the largest value reachable from it.
pub const PRIOR_VARIANCE: f64 = 1.0 / 12.0;

/// Paired evidential grids over one shelf.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    grid: GridSpec,
    n_classes: usize,
    occupancy: Vec<BetaParams>,
    /// `n_cells * n_classes` lambdas, cell-major.
    semantics: Vec<f64>,
}

/// Per-cell uncertainty channels on the `rows x cols` footprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyMaps {
    pub rows: usize,
    pub cols: usize,
    /// Column maximum of voxel Beta variance.
    pub u_o: Vec<f64>,
    /// Dirichlet `N / S` per cell.
    pub u_s: Vec<f64>,
}

impl UncertaintyMaps {
    /// `u_o` divided by the prior variance and clamped to `[0, 1]`.
    pub fn u_o_normalized(&self) -> Vec<f64> {
        self.u_o
            .iter()
            .map(|v| (v / PRIOR_VARIANCE).clamp(0.0, 1.0))
            .collect()
    }
}

/// Grid-wide averages used for uncertainty rewards and logging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefSummary {
    /// Mean Beta variance over all voxels.
    pub mean_u_o: f64,
    /// Mean Dirichlet uncertainty over all cells.
    pub mean_u_s: f64,
}

impl BeliefState {
    /// A belief with every voxel and cell at the unit prior.
    pub fn new(grid: GridSpec, n_classes: usize) -> Result<Self> {
        grid.validate()?;
        if n_classes < 2 {
            return Err(Error::config("n_classes", "need at least two classes"));
        }
        Ok(BeliefState {
            grid,
            n_classes,
            occupancy: vec![BetaParams::PRIOR; grid.n_voxels()],
            semantics: vec![1.0; grid.n_cells() * n_classes],
        })
    }

    pub(crate) fn from_parts(
        grid: GridSpec,
        n_classes: usize,
        occupancy: Vec<BetaParams>,
        semantics: Vec<f64>,
    ) -> Result<Self> {
        if occupancy.len() != grid.n_voxels() || semantics.len() != grid.n_cells() * n_classes {
            return Err(Error::Format("belief buffers do not match the grid".into()));
        }
        if occupancy
            .iter()
            .any(|p| !(p.alpha > 0.0 && p.beta > 0.0 && p.alpha.is_finite() && p.beta.is_finite()))
            || semantics.iter().any(|l| !(*l > 0.0 && l.is_finite()))
        {
            return Err(Error::Format(
                "belief contains non-positive evidence".into(),
            ));
        }
        Ok(BeliefState {
            grid,
            n_classes,
            occupancy,
            semantics,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn occupancy(&self) -> &[BetaParams] {
        &self.occupancy
    }

    pub fn semantics(&self) -> &[f64] {
        &self.semantics
    }

    #[inline]
    pub fn voxel(&self, voxel: usize) -> BetaParams {
        self.occupancy[voxel]
    }

    #[inline]
    pub fn voxel_mut(&mut self, voxel: usize) -> &mut BetaParams {
        &mut self.occupancy[voxel]
    }

    #[inline]
    pub fn cell_lambdas(&self, cell: usize) -> &[f64] {
        let n = self.n_classes;
        &self.semantics[cell * n..(cell + 1) * n]
    }

    #[inline]
    pub fn cell_lambdas_mut(&mut self, cell: usize) -> &mut [f64] {
        let n = self.n_classes;
        &mut self.semantics[cell * n..(cell + 1) * n]
    }

    #[inline]
    pub fn fuse_voxel(&mut self, voxel: usize, evidence: Evidence, weight: f64) {
        self.occupancy[voxel].fuse(evidence, weight);
    }

    pub fn fuse_cell(&mut self, cell: usize, class: usize, weight: f64) -> Result<()> {
        if cell >= self.grid.n_cells() {
            return Err(Error::Contract(format!("cell {cell} outside the grid")));
        }
        params::fuse_class(self.cell_lambdas_mut(cell), class, weight)
    }

    /// Restores a whole footprint cell (height column and semantics) to the prior.
    pub fn reset_cell(&mut self, cell: usize) {
        let col = self.grid.column(cell);
        self.occupancy[col].fill(BetaParams::PRIOR);
        self.cell_lambdas_mut(cell).fill(1.0);
    }

    #[inline]
    pub fn is_occupied(&self, voxel: usize, threshold: f64) -> bool {
        self.occupancy[voxel].is_occupied(threshold)
    }

    #[inline]
    pub fn cell_uncertainty(&self, cell: usize) -> f64 {
        params::uncertainty(self.cell_lambdas(cell))
    }

    #[inline]
    pub fn cell_label(&self, cell: usize) -> u16 {
        params::hard_label(self.cell_lambdas(cell)) as u16
    }

    /// Largest voxel variance in a column.
    pub fn column_variance(&self, cell: usize) -> f64 {
        self.occupancy[self.grid.column(cell)]
            .iter()
            .map(BetaParams::variance)
            .fold(0.0, f64::max)
    }

    /// Largest expected occupancy in a column: the 2D occupancy probability.
    pub fn column_occupancy(&self, cell: usize) -> f64 {
        self.occupancy[self.grid.column(cell)]
            .iter()
            .map(BetaParams::mean)
            .fold(0.0, f64::max)
    }

    pub fn occupancy_map(&self) -> Vec<f64> {
        (0..self.grid.n_cells())
            .map(|c| self.column_occupancy(c))
            .collect()
    }

    pub fn hard_labels(&self) -> Vec<u16> {
        (0..self.grid.n_cells())
            .map(|c| self.cell_label(c))
            .collect()
    }

    pub fn uncertainty_maps(&self) -> UncertaintyMaps {
        let n = self.grid.n_cells();
        UncertaintyMaps {
            rows: self.grid.rows,
            cols: self.grid.cols,
            u_o: (0..n).map(|c| self.column_variance(c)).collect(),
            u_s: (0..n).map(|c| self.cell_uncertainty(c)).collect(),
        }
    }

    /// Height in meters of the topmost voxel whose mean is at least
    /// `threshold`, per cell; 0 where no voxel qualifies.
    pub fn height_map(&self, threshold: f64) -> Result<Vec<f64>> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::Range {
                field: "theta_occ",
                value: threshold,
            });
        }
        let res = self.grid.resolution;
        Ok((0..self.grid.n_cells())
            .map(|cell| {
                self.occupancy[self.grid.column(cell)]
                    .iter()
                    .rposition(|p| p.is_occupied(threshold))
                    .map_or(0.0, |k| (k + 1) as f64 * res)
            })
            .collect())
    }

    pub fn summary(&self) -> BeliefSummary {
        let mean_u_o = self.occupancy.iter().map(BetaParams::variance).sum::<f64>()
            / self.occupancy.len() as f64;
        let n = self.grid.n_cells();
        let mean_u_s = (0..n).map(|c| self.cell_uncertainty(c)).sum::<f64>() / n as f64;
        BeliefSummary { mean_u_o, mean_u_s }
    }

    /// Total Dirichlet evidence over the map.
    pub fn semantic_mass(&self) -> f64 {
        self.semantics.iter().sum()
    }
}
