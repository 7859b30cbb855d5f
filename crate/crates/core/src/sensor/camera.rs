use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::view::ViewPose;

/// Pinhole depth/semantic camera sampled on a regular ray grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraModel {
    /// Horizontal field of view in radians.
    pub h_fov: f64,
    /// Vertical field of view in radians.
    pub v_fov: f64,
    pub rays_x: usize,
    pub rays_y: usize,
    pub max_range: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel {
            h_fov: 70f64.to_radians(),
            v_fov: 55f64.to_radians(),
            rays_x: 128,
            rays_y: 96,
            max_range: 1.0,
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        if !(self.h_fov > 0.0 && self.h_fov < pi) {
            return Err(Error::config("camera.h_fov", "must lie in (0, pi)"));
        }
        if !(self.v_fov > 0.0 && self.v_fov < pi) {
            return Err(Error::config("camera.v_fov", "must lie in (0, pi)"));
        }
        if self.rays_x < 8 || self.rays_y < 8 {
            return Err(Error::config("camera.rays", "need at least 8x8 rays"));
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return Err(Error::config("camera.max_range", "must be positive"));
        }
        Ok(())
    }

    /// Same optics with a different ray grid.
    pub fn with_rays(&self, rays_x: usize, rays_y: usize) -> Self {
        CameraModel {
            rays_x,
            rays_y,
            ..*self
        }
    }

    pub fn n_rays(&self) -> usize {
        self.rays_x * self.rays_y
    }

    /// Unit ray directions in row-major image order (top row first), or
    /// `None` when the view direction is degenerate or vertical.
    pub fn ray_directions(&self, pose: &ViewPose) -> Option<Vec<Vector3<f64>>> {
        let (f, r, u) = look_at_frame(pose)?;
        let tx = (0.5 * self.h_fov).tan();
        let ty = (0.5 * self.v_fov).tan();
        let mut out = Vec::with_capacity(self.n_rays());
        for j in 0..self.rays_y {
            let v = (1.0 - 2.0 * (j as f64 + 0.5) / self.rays_y as f64) * ty;
            for i in 0..self.rays_x {
                let h = (2.0 * (i as f64 + 0.5) / self.rays_x as f64 - 1.0) * tx;
                out.push((f + r * h + u * v).normalize());
            }
        }
        Some(out)
    }
}

/// `(forward, right, up)` for a look-at pose with world up `+z`.
pub fn look_at_frame(pose: &ViewPose) -> Option<(Vector3<f64>, Vector3<f64>, Vector3<f64>)> {
    let d = pose.target - pose.cam;
    let n = d.norm();
    if !(n > 1e-9) {
        return None;
    }
    let f = d / n;
    let r = f.cross(&Vector3::z());
    let rn = r.norm();
    if rn < 1e-6 {
        return None;
    }
    let r = r / rn;
    let u = r.cross(&f);
    Some((f, r, u))
}
