//! Amanatides-Woo voxel traversal restricted to the shelf interior.
//!
//! Rays may only enter the grid through the open front face (`y = 0`) or the
//! open top. A ray whose first contact with the grid box is a side wall, the
//! back wall or the board is blocked by the shelf itself.

use nalgebra::Vector3;

use crate::grid::GridSpec;

/// How a traced ray ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceEnd {
    /// `visit` reported the voxel as occupied; `t` is where the ray entered it.
    Hit { voxel: usize, t: f64 },
    /// Left the grid through the board; `voxel` is the last one traversed.
    Floor { voxel: usize, t: f64 },
    /// Left through a side or back wall.
    Wall { t: f64 },
    /// Left through the front or top, or never met the grid.
    Open,
    /// Ran out of range inside the grid.
    Range,
    /// First met the grid on a wall or the board.
    Blocked,
}

/// Walks the voxels along `origin + t * dir` for `t` in `[0, max_range]`.
/// `visit` receives each voxel in order and returns true to stop there.
pub fn trace<F: FnMut(usize) -> bool>(
    grid: &GridSpec,
    origin: Vector3<f64>,
    dir: Vector3<f64>,
    max_range: f64,
    mut visit: F,
) -> TraceEnd {
    let lo = Vector3::from(grid.origin);
    let ext = grid.extent();
    let hi = lo + Vector3::new(ext[0], ext[1], ext[2]);
    let dims = [grid.cols, grid.rows, grid.layers];

    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    let mut enter_axis = usize::MAX;
    for a in 0..3 {
        if dir[a].abs() < 1e-15 {
            if origin[a] < lo[a] || origin[a] > hi[a] {
                return TraceEnd::Open;
            }
            continue;
        }
        let inv = 1.0 / dir[a];
        let (t0, t1) = {
            let ta = (lo[a] - origin[a]) * inv;
            let tb = (hi[a] - origin[a]) * inv;
            (ta.min(tb), ta.max(tb))
        };
        if t0 > t_enter {
            t_enter = t0;
            enter_axis = a;
        }
        t_exit = t_exit.min(t1);
    }
    if t_enter > t_exit || t_exit < 0.0 {
        return TraceEnd::Open;
    }
    if t_enter > 0.0 {
        let through_front = enter_axis == 1 && dir.y > 0.0;
        let through_top = enter_axis == 2 && dir.z < 0.0;
        if !(through_front || through_top) {
            return TraceEnd::Blocked;
        }
        if t_enter > max_range {
            return TraceEnd::Range;
        }
    }
    let t_start = t_enter.max(0.0);

    let res = grid.resolution;
    let p = origin + dir * t_start;
    let mut idx = [0i64; 3];
    let mut step = [0i64; 3];
    let mut t_max = [f64::INFINITY; 3];
    let mut t_delta = [f64::INFINITY; 3];
    for a in 0..3 {
        let f = ((p[a] - lo[a]) / res).floor() as i64;
        let mut i = f.clamp(0, dims[a] as i64 - 1);
        // Entering exactly on a face: start on the inside of it.
        if a == enter_axis && t_enter > 0.0 {
            i = if dir[a] > 0.0 { 0 } else { dims[a] as i64 - 1 };
        }
        idx[a] = i;
        if dir[a] > 1e-15 {
            step[a] = 1;
            t_max[a] = (lo[a] + (i + 1) as f64 * res - origin[a]) / dir[a];
            t_delta[a] = res / dir[a];
        } else if dir[a] < -1e-15 {
            step[a] = -1;
            t_max[a] = (lo[a] + i as f64 * res - origin[a]) / dir[a];
            t_delta[a] = -res / dir[a];
        }
    }

    let mut t = t_start;
    loop {
        let voxel = grid.voxel_index(idx[1] as usize, idx[0] as usize, idx[2] as usize);
        if visit(voxel) {
            return TraceEnd::Hit { voxel, t };
        }
        let a = if t_max[0] < t_max[1] {
            if t_max[0] < t_max[2] {
                0
            } else {
                2
            }
        } else if t_max[1] < t_max[2] {
            1
        } else {
            2
        };
        t = t_max[a];
        if t > max_range {
            return TraceEnd::Range;
        }
        idx[a] += step[a];
        t_max[a] += t_delta[a];
        if idx[a] < 0 || idx[a] >= dims[a] as i64 {
            return match (a, step[a]) {
                (2, -1) => TraceEnd::Floor { voxel, t },
                (2, _) | (1, -1) => TraceEnd::Open,
                _ => TraceEnd::Wall { t },
            };
        }
    }
}
