//! Simulated depth + semantic camera and evidence fusion.

mod camera;
mod dda;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use camera::{look_at_frame, CameraModel};
pub use dda::{trace, TraceEnd};

use crate::belief::{BeliefState, Evidence};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scene::GroundTruth;
use crate::view::ViewPose;
use crate::FREE_CLASS;

/// Voxel occupancy as seen by a ray caster.
pub trait OccupancyQuery {
    fn grid(&self) -> &GridSpec;
    fn occupied(&self, voxel: usize) -> bool;
}

impl OccupancyQuery for GroundTruth {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    fn occupied(&self, voxel: usize) -> bool {
        self.occupied[voxel]
    }
}

/// The belief with voxels at or above `threshold` mean treated as solid.
#[derive(Clone, Copy)]
pub struct ThresholdedBelief<'a> {
    pub belief: &'a BeliefState,
    pub threshold: f64,
}

impl OccupancyQuery for ThresholdedBelief<'_> {
    fn grid(&self) -> &GridSpec {
        self.belief.grid()
    }

    #[inline]
    fn occupied(&self, voxel: usize) -> bool {
        self.belief.is_occupied(voxel, self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RayHit {
    Object {
        voxel: u32,
        class: u16,
    },
    /// The ray reached the shelf board through free space.
    Floor {
        cell: u32,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayRecord {
    pub hit: RayHit,
    /// Distance to the hit voxel's entry point; the traversed length otherwise.
    pub distance: f64,
    /// Range of this ray's free voxels in [`Observation::free`].
    pub free_start: u32,
    pub free_end: u32,
}

/// One rendered frame. Free voxels of all rays share a single buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub rays: Vec<RayRecord>,
    pub free: Vec<u32>,
}

impl Observation {
    /// The frame returned for an infeasible action.
    pub fn empty() -> Self {
        Observation {
            rays: Vec::new(),
            free: Vec::new(),
        }
    }

    pub fn free_voxels(&self, ray: &RayRecord) -> &[u32] {
        &self.free[ray.free_start as usize..ray.free_end as usize]
    }

    pub fn n_hits(&self) -> usize {
        self.rays
            .iter()
            .filter(|r| matches!(r.hit, RayHit::Object { .. }))
            .count()
    }

    /// Object hits as a `rays_y x rays_x` distance image (0 where nothing was hit).
    pub fn depth_image(&self) -> Vec<f64> {
        self.rays
            .iter()
            .map(|r| match r.hit {
                RayHit::Object { .. } => r.distance,
                _ => 0.0,
            })
            .collect()
    }
}

/// Renders a view against ground truth.
pub fn render_view(gt: &GroundTruth, pose: &ViewPose, cam: &CameraModel) -> Observation {
    let Some(dirs) = cam.ray_directions(pose) else {
        return Observation::empty();
    };
    let grid = gt.grid;
    let mut obs = Observation {
        rays: Vec::with_capacity(dirs.len()),
        free: Vec::new(),
    };
    for dir in dirs {
        let free_start = obs.free.len() as u32;
        let free = &mut obs.free;
        let end = trace(&grid, pose.cam, dir, cam.max_range, |v| {
            if gt.occupied[v] {
                true
            } else {
                free.push(v as u32);
                false
            }
        });
        let traversed = |t: f64| t.min(cam.max_range);
        let (hit, distance) = match end {
            TraceEnd::Hit { voxel, t } => (
                RayHit::Object {
                    voxel: voxel as u32,
                    class: gt.labels[grid.voxel_cell(voxel)],
                },
                t,
            ),
            TraceEnd::Floor { voxel, t } => (
                RayHit::Floor {
                    cell: grid.voxel_cell(voxel) as u32,
                },
                traversed(t),
            ),
            TraceEnd::Wall { t } => (RayHit::None, traversed(t)),
            _ => (RayHit::None, cam.max_range),
        };
        obs.rays.push(RayRecord {
            hit,
            distance,
            free_start,
            free_end: obs.free.len() as u32,
        });
    }
    obs
}

/// Flips the class of each object hit with probability `p` to a uniformly
/// drawn different object class.
pub fn apply_class_noise(
    obs: &mut Observation,
    p: f64,
    n_classes: usize,
    rng: &mut crate::rng::Rng,
) {
    if p <= 0.0 || n_classes < 3 {
        return;
    }
    for ray in &mut obs.rays {
        if let RayHit::Object { ref mut class, .. } = ray.hit {
            if rng.gen::<f64>() < p {
                let mut c = rng.gen_range(1..n_classes as u16 - 1);
                if c >= *class {
                    c += 1;
                }
                *class = c;
            }
        }
    }
}

/// Evidence weights applied per ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionWeights {
    /// Beta evidence per traversed or hit voxel.
    pub occupancy: f64,
    /// Dirichlet evidence per hit column.
    pub semantic: f64,
    /// Also credit hit evidence to the voxels below an object hit. Objects
    /// stand on the board and nothing is stacked, so the column under a
    /// visible surface is solid.
    pub column_support: bool,
    /// Credit free-space class evidence to the cell where a ray meets the board.
    pub floor_semantics: bool,
}

impl Default for FusionWeights {
    fn default() -> Self {
        FusionWeights {
            occupancy: 8.0,
            semantic: 60.0,
            column_support: true,
            floor_semantics: true,
        }
    }
}

impl FusionWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.occupancy > 0.0 && self.occupancy.is_finite()) {
            return Err(Error::config("fusion.occupancy", "must be positive"));
        }
        if !(self.semantic > 0.0 && self.semantic.is_finite()) {
            return Err(Error::config("fusion.semantic", "must be positive"));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        FusionWeights {
            occupancy: self.occupancy * k,
            semantic: self.semantic * k,
            ..*self
        }
    }
}

/// Fuses a rendered frame into the belief.
pub fn integrate_observation(
    belief: &mut BeliefState,
    obs: &Observation,
    w: &FusionWeights,
) -> Result<()> {
    w.validate()?;
    let grid = *belief.grid();
    let n_vox = grid.n_voxels() as u32;
    if obs.free.iter().any(|&v| v >= n_vox) {
        return Err(Error::Contract(
            "observation does not match the belief grid".into(),
        ));
    }
    for &v in &obs.free {
        belief.fuse_voxel(v as usize, Evidence::Miss, w.occupancy);
    }
    for ray in &obs.rays {
        match ray.hit {
            RayHit::Object { voxel, class } => {
                if voxel >= n_vox {
                    return Err(Error::Contract("hit voxel outside the belief grid".into()));
                }
                let voxel = voxel as usize;
                let cell = grid.voxel_cell(voxel);
                let lowest = if w.column_support {
                    cell * grid.layers
                } else {
                    voxel
                };
                for v in lowest..=voxel {
                    belief.fuse_voxel(v, Evidence::Hit, w.occupancy);
                }
                belief.fuse_cell(cell, class as usize, w.semantic)?;
            }
            RayHit::Floor { cell } if w.floor_semantics => {
                belief.fuse_cell(cell as usize, FREE_CLASS as usize, w.semantic)?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// Reusable dedup buffer for visibility queries.
#[derive(Debug, Clone, Default)]
pub struct VisibilityScratch {
    stamps: Vec<u32>,
    epoch: u32,
    pub visible: Vec<u32>,
}

impl VisibilityScratch {
    pub fn new(n_voxels: usize) -> Self {
        VisibilityScratch {
            stamps: vec![0; n_voxels],
            epoch: 0,
            visible: Vec::new(),
        }
    }

    fn begin(&mut self, n_voxels: usize) {
        if self.stamps.len() != n_voxels {
            self.stamps = vec![0; n_voxels];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.fill(0);
            self.epoch = 1;
        }
        self.visible.clear();
    }

    /// Collects the distinct voxels every ray of `cam` traverses or hits,
    /// in first-visit order.
    pub fn collect<Q: OccupancyQuery>(&mut self, query: &Q, pose: &ViewPose, cam: &CameraModel) {
        let grid = *query.grid();
        self.begin(grid.n_voxels());
        let Some(dirs) = cam.ray_directions(pose) else {
            return;
        };
        let (stamps, epoch, visible) = (&mut self.stamps, self.epoch, &mut self.visible);
        for dir in dirs {
            trace(&grid, pose.cam, dir, cam.max_range, |v| {
                if stamps[v] != epoch {
                    stamps[v] = epoch;
                    visible.push(v as u32);
                }
                query.occupied(v)
            });
        }
    }
}

/// Sorted set of voxels a render from `pose` would traverse or hit.
pub fn visible_voxel_set<Q: OccupancyQuery>(
    query: &Q,
    pose: &ViewPose,
    cam: &CameraModel,
) -> Vec<u32> {
    let mut scratch = VisibilityScratch::new(query.grid().n_voxels());
    scratch.collect(query, pose, cam);
    let mut v = scratch.visible;
    v.sort_unstable();
    v
}
