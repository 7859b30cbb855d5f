use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Camera position plus look-at point, both in world meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewPose {
    pub cam: Vector3<f64>,
    pub target: Vector3<f64>,
}

impl ViewPose {
    pub fn new(cam: Vector3<f64>, target: Vector3<f64>) -> Self {
        ViewPose { cam, target }
    }

    /// Unit viewing direction, if `cam != target`.
    pub fn direction(&self) -> Option<Vector3<f64>> {
        let d = self.target - self.cam;
        let n = d.norm();
        (n > 1e-12).then(|| d / n)
    }
}

/// Axis-aligned box given by center and half extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aabb3 {
    pub center: Vector3<f64>,
    pub half: Vector3<f64>,
}

impl Aabb3 {
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|a| (p[a] - self.center[a]).abs() <= self.half[a] * (1.0 + 1e-12))
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|a| self.half[a] > 0.0 && self.half[a].is_finite() && self.center[a].is_finite())
    }

    /// Point at normalized coordinates in `[-1, 1]^3`.
    pub fn lerp(&self, n: [f64; 3]) -> Vector3<f64> {
        Vector3::new(
            self.center.x + n[0] * self.half.x,
            self.center.y + n[1] * self.half.y,
            self.center.z + n[2] * self.half.z,
        )
    }
}

/// Sampling boxes for the camera position and the look-at target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionBoxes {
    pub cam: Aabb3,
    pub target: Aabb3,
}

impl ActionBoxes {
    /// Boxes of 0.8 x 0.2 x 0.2 m: the camera in front of the shelf, the
    /// target region over the shelf board.
    pub fn for_shelf_width(width: f64) -> Self {
        ActionBoxes {
            cam: Aabb3 {
                center: Vector3::new(0.5 * width, -0.15, 0.15),
                half: Vector3::new(0.4, 0.1, 0.1),
            },
            target: Aabb3 {
                center: Vector3::new(0.5 * width, 0.2, 0.1),
                half: Vector3::new(0.4, 0.1, 0.1),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.cam.is_valid() || !self.target.is_valid() {
            return Err(Error::config("view.boxes", "half extents must be positive"));
        }
        Ok(())
    }

    pub fn contains(&self, v: &ViewPose) -> bool {
        self.cam.contains(&v.cam) && self.target.contains(&v.target)
    }

    pub fn center(&self) -> ViewPose {
        ViewPose::new(self.cam.center, self.target.center)
    }

    pub fn normalize(&self, v: &ViewPose) -> Result<[f64; 6]> {
        let mut out = [0.0; 6];
        for (k, (p, b)) in [(v.cam, &self.cam), (v.target, &self.target)]
            .into_iter()
            .enumerate()
        {
            for a in 0..3 {
                let n = (p[a] - b.center[a]) / b.half[a];
                if !(n.abs() <= 1.0 + 1e-12) {
                    return Err(Error::Range {
                        field: "view pose",
                        value: p[a],
                    });
                }
                out[3 * k + a] = n;
            }
        }
        Ok(out)
    }

    pub fn denormalize(&self, a: &[f64; 6]) -> Result<ViewPose> {
        if let Some(x) = a.iter().find(|x| !(x.abs() <= 1.0 + 1e-12)) {
            return Err(Error::Range {
                field: "normalized action",
                value: *x,
            });
        }
        Ok(ViewPose::new(
            self.cam.lerp([a[0], a[1], a[2]]),
            self.target.lerp([a[3], a[4], a[5]]),
        ))
    }
}
