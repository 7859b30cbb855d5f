//! Planar footprints: axis-aligned rectangles and circles.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Axis-aligned box with full edge lengths along `x` and `y`.
    Box { size_x: f64, size_y: f64 },
    /// Upright cylinder.
    Cylinder { radius: f64 },
}

impl Shape {
    pub fn area(&self) -> f64 {
        match *self {
            Shape::Box { size_x, size_y } => size_x * size_y,
            Shape::Cylinder { radius } => std::f64::consts::PI * radius * radius,
        }
    }

    /// Radius of the smallest circle around the center containing the shape.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            Shape::Box { size_x, size_y } => 0.5 * size_x.hypot(size_y),
            Shape::Cylinder { radius } => radius,
        }
    }

    /// Half extents of the axis-aligned bounding box.
    pub fn half_extents(&self) -> Vector2<f64> {
        match *self {
            Shape::Box { size_x, size_y } => Vector2::new(0.5 * size_x, 0.5 * size_y),
            Shape::Cylinder { radius } => Vector2::new(radius, radius),
        }
    }

    /// Width of the shape projected onto a unit direction.
    pub fn extent_along(&self, dir: Vector2<f64>) -> f64 {
        match *self {
            Shape::Box { size_x, size_y } => size_x * dir.x.abs() + size_y * dir.y.abs(),
            Shape::Cylinder { radius } => 2.0 * radius,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Box { size_x, size_y } => size_x > 0.0 && size_y > 0.0,
            Shape::Cylinder { radius } => radius > 0.0,
        }
    }
}

/// A shape placed at a center point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub center: Vector2<f64>,
    pub shape: Shape,
}

impl Footprint {
    pub fn new(center: Vector2<f64>, shape: Shape) -> Self {
        Footprint { center, shape }
    }

    pub fn translated(&self, by: Vector2<f64>) -> Self {
        Footprint {
            center: self.center + by,
            shape: self.shape,
        }
    }

    pub fn contains(&self, p: Vector2<f64>) -> bool {
        let d = p - self.center;
        match self.shape {
            Shape::Box { size_x, size_y } => d.x.abs() < 0.5 * size_x && d.y.abs() < 0.5 * size_y,
            Shape::Cylinder { radius } => d.norm_squared() < radius * radius,
        }
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn aabb(&self) -> (Vector2<f64>, Vector2<f64>) {
        let h = self.shape.half_extents();
        (self.center - h, self.center + h)
    }

    /// Signed separation: positive when apart, negative when penetrating.
    /// For two boxes this is the larger per-axis gap, which has the same
    /// sign as the Euclidean distance.
    pub fn separation(&self, other: &Footprint) -> f64 {
        let d = other.center - self.center;
        match (self.shape, other.shape) {
            (Shape::Box { .. }, Shape::Box { .. }) => {
                let h = self.shape.half_extents() + other.shape.half_extents();
                (d.x.abs() - h.x).max(d.y.abs() - h.y)
            }
            (Shape::Cylinder { radius: r1 }, Shape::Cylinder { radius: r2 }) => d.norm() - r1 - r2,
            (Shape::Box { .. }, Shape::Cylinder { radius }) => {
                box_point_signed_distance(self.shape.half_extents(), d) - radius
            }
            (Shape::Cylinder { radius }, Shape::Box { .. }) => {
                box_point_signed_distance(other.shape.half_extents(), -d) - radius
            }
        }
    }

    /// True when the shapes penetrate; touching does not count.
    pub fn overlaps(&self, other: &Footprint) -> bool {
        self.separation(other) < -1e-12
    }

    /// Smallest `t >= 0` such that `other` moved by `t * dir` no longer
    /// penetrates `self`. `dir` must be a unit vector.
    pub fn clearance_along(&self, other: &Footprint, dir: Vector2<f64>) -> f64 {
        if !self.overlaps(other) {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = (other.center - self.center).norm()
            + self.shape.bounding_radius()
            + other.shape.bounding_radius()
            + 1e-9;
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.separation(&other.translated(dir * mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Distance along a ray from `origin` (unit `dir`) to where it first
    /// enters the footprint. `None` if the ray misses or starts inside.
    pub fn ray_entry(&self, origin: Vector2<f64>, dir: Vector2<f64>) -> Option<f64> {
        if self.contains(origin) {
            return None;
        }
        let o = origin - self.center;
        match self.shape {
            Shape::Box { size_x, size_y } => {
                let h = [0.5 * size_x, 0.5 * size_y];
                let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
                for a in 0..2 {
                    if dir[a].abs() < 1e-15 {
                        if o[a].abs() >= h[a] {
                            return None;
                        }
                    } else {
                        let ta = (-h[a] - o[a]) / dir[a];
                        let tb = (h[a] - o[a]) / dir[a];
                        t0 = t0.max(ta.min(tb));
                        t1 = t1.min(ta.max(tb));
                    }
                }
                (t0 < t1).then_some(t0)
            }
            Shape::Cylinder { radius } => {
                let b = o.dot(&dir);
                let c = o.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    return None;
                }
                let t = -b - disc.sqrt();
                (t >= 0.0).then_some(t)
            }
        }
    }
}

/// Signed distance from a point (relative to the box center) to a box.
fn box_point_signed_distance(half: Vector2<f64>, p: Vector2<f64>) -> f64 {
    let q = Vector2::new(p.x.abs() - half.x, p.y.abs() - half.y);
    let outside = Vector2::new(q.x.max(0.0), q.y.max(0.0)).norm();
    outside + q.x.max(q.y).min(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rect(x: f64, y: f64, sx: f64, sy: f64) -> Footprint {
        Footprint::new(
            Vector2::new(x, y),
            Shape::Box {
                size_x: sx,
                size_y: sy,
            },
        )
    }

    fn circle(x: f64, y: f64, r: f64) -> Footprint {
        Footprint::new(Vector2::new(x, y), Shape::Cylinder { radius: r })
    }

    #[test]
    fn separation_signs() {
        assert_abs_diff_eq!(
            rect(0.0, 0.0, 2.0, 2.0).separation(&rect(3.0, 0.0, 2.0, 2.0)),
            1.0
        );
        assert!(rect(0.0, 0.0, 2.0, 2.0).overlaps(&rect(1.5, 0.5, 2.0, 2.0)));
        assert!(!rect(0.0, 0.0, 2.0, 2.0).overlaps(&rect(2.0, 0.0, 2.0, 2.0)));
        assert_abs_diff_eq!(
            circle(0.0, 0.0, 1.0).separation(&circle(3.0, 4.0, 1.0)),
            3.0
        );
        assert_abs_diff_eq!(
            rect(0.0, 0.0, 2.0, 2.0).separation(&circle(3.0, 0.0, 1.0)),
            1.0
        );
        assert_abs_diff_eq!(
            circle(3.0, 0.0, 1.0).separation(&rect(0.0, 0.0, 2.0, 2.0)),
            1.0
        );
        // Corner case: distance to the corner, not the axis gap.
        let s = rect(0.0, 0.0, 2.0, 2.0).separation(&circle(2.0, 2.0, 1.0));
        assert_abs_diff_eq!(s, 2f64.sqrt() - 1.0, epsilon = 1e-12);
        assert!(rect(0.0, 0.0, 2.0, 2.0).overlaps(&circle(0.0, 0.0, 0.1)));
    }

    #[test]
    fn clearance_of_boxes_matches_closed_form() {
        let a = rect(0.0, 0.0, 0.04, 0.04);
        let b = rect(0.035, 0.01, 0.04, 0.04);
        // b must slide until its left edge meets a's right edge: 0.02 + 0.02 - 0.035.
        let t = a.clearance_along(&b, Vector2::new(1.0, 0.0));
        assert_abs_diff_eq!(t, 0.005, epsilon = 1e-12);
        assert_eq!(
            a.clearance_along(&rect(1.0, 0.0, 0.1, 0.1), Vector2::x()),
            0.0
        );
    }

    #[test]
    fn clearance_of_circles() {
        let a = circle(0.0, 0.0, 1.0);
        let b = circle(1.0, 0.0, 1.0);
        assert_abs_diff_eq!(a.clearance_along(&b, Vector2::x()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ray_entry_distances() {
        let b = rect(0.0, 0.0, 2.0, 2.0);
        assert_abs_diff_eq!(
            b.ray_entry(Vector2::new(-3.0, 0.5), Vector2::x()).unwrap(),
            2.0
        );
        assert!(b.ray_entry(Vector2::new(-3.0, 1.5), Vector2::x()).is_none());
        assert!(b.ray_entry(Vector2::new(3.0, 0.0), Vector2::x()).is_none());
        assert!(b.ray_entry(Vector2::new(0.0, 0.0), Vector2::x()).is_none());
        let c = circle(0.0, 0.0, 1.0);
        assert_abs_diff_eq!(
            c.ray_entry(Vector2::new(0.0, -5.0), Vector2::y()).unwrap(),
            4.0
        );
    }

    #[test]
    fn extent_along_direction() {
        let s = Shape::Box {
            size_x: 0.1,
            size_y: 0.04,
        };
        assert_abs_diff_eq!(s.extent_along(Vector2::x()), 0.1);
        assert_abs_diff_eq!(s.extent_along(Vector2::y()), 0.04);
        assert_abs_diff_eq!(
            Shape::Cylinder { radius: 0.03 }.extent_along(Vector2::x()),
            0.06
        );
    }
}
