use super::pose::{ActionBoxes, ViewPose};
use crate::sensor::{look_at_frame, OccupancyQuery};

/// Geometric stand-in for a reachability check.
pub fn feasibility<Q: OccupancyQuery>(v: &ViewPose, boxes: &ActionBoxes, world: &Q) -> bool {
    if !boxes.cam.contains(&v.cam) || !boxes.target.contains(&v.target) {
        return false;
    }
    if look_at_frame(v).is_none() {
        return false;
    }
    let g = world.grid();
    if let Some(voxel) = g.world_to_voxel([v.cam.x, v.cam.y, v.cam.z]) {
        if world.occupied(voxel) {
            return false;
        }
    }
    !inside_shelf_structure(v, g)
}

/// The side walls and the board, i.e. the slabs around the interior
/// at depths the shelf occupies.
fn inside_shelf_structure(v: &ViewPose, g: &crate::grid::GridSpec) -> bool {
    let ext = g.extent();
    let p = v.cam - nalgebra::Vector3::from(g.origin);
    let within_depth = p.y >= 0.0 && p.y <= ext[1];
    let within_height = p.z <= ext[2];
    within_depth && within_height && (p.x < 0.0 || p.x > ext[0] || p.z < 0.0)
}
