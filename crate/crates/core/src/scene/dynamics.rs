//! Quasi-static push dynamics.
//!
//! The pusher is a point that travels from the push start along the push
//! direction. The first footprint on its path is the target, which then
//! translates by the push length in small increments. After every increment
//! any penetrated neighbor is slid along the push direction just far enough
//! to clear, transitively up to a chain depth. Objects never rotate.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::Scene;
use crate::error::{Error, Result};
use crate::push::PushCandidate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    /// A non-target object forced to move farther than this in one push falls.
    pub fall_threshold: f64,
    /// Longest chain of objects a push can shove; deeper contact blocks it.
    pub max_chain_depth: usize,
    /// Largest integration increment in meters.
    pub step: f64,
    /// How far the pusher travels looking for its first contact.
    pub max_reach: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            fall_threshold: 0.15,
            max_chain_depth: 3,
            step: 0.001,
            max_reach: 0.1,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fall_threshold > 0.0 && self.fall_threshold.is_finite()) {
            return Err(Error::config("dynamics.fall_threshold", "must be positive"));
        }
        if !(self.step > 0.0 && self.step <= 0.01) {
            return Err(Error::config("dynamics.step", "must lie in (0, 0.01] m"));
        }
        if !(self.max_reach > 0.0 && self.max_reach.is_finite()) {
            return Err(Error::config("dynamics.max_reach", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub id: u32,
    pub dx: f64,
    pub dy: f64,
}

impl Displacement {
    pub fn magnitude(&self) -> f64 {
        self.dx.hypot(self.dy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushOutcome {
    /// Object the pusher touched first, if any.
    pub target: Option<u32>,
    /// One entry per scene object, zero for objects that did not move.
    pub displacements: Vec<Displacement>,
    pub fallen: Vec<u32>,
    /// Objects other than the target that moved.
    pub secondary_contacts: usize,
    /// True when a contact chain deeper than the limit stopped the push early.
    pub blocked: bool,
}

impl PushOutcome {
    fn idle(scene: &Scene) -> Self {
        PushOutcome {
            target: None,
            displacements: scene
                .objects
                .iter()
                .map(|o| Displacement {
                    id: o.id,
                    dx: 0.0,
                    dy: 0.0,
                })
                .collect(),
            fallen: Vec::new(),
            secondary_contacts: 0,
            blocked: false,
        }
    }

    /// Sum of displacement magnitudes over all objects.
    pub fn total_displacement(&self) -> f64 {
        self.displacements.iter().map(Displacement::magnitude).sum()
    }

    pub fn collided(&self) -> bool {
        self.secondary_contacts > 0 || !self.fallen.is_empty()
    }
}

pub fn check_termination_fall(outcome: &PushOutcome) -> bool {
    !outcome.fallen.is_empty()
}

pub fn apply_push(
    scene: &Scene,
    push: &PushCandidate,
    cfg: &DynamicsConfig,
) -> Result<(Scene, PushOutcome)> {
    if !(push.length > 0.0 && push.length.is_finite()) {
        return Err(Error::PushPrecondition(format!(
            "push length must be positive, got {}",
            push.length
        )));
    }
    let norm = push.direction.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::PushPrecondition(
            "push direction is degenerate".into(),
        ));
    }
    let dir = push.direction / norm;
    if let Some(o) = scene.object_at(push.start) {
        return Err(Error::PushPrecondition(format!(
            "push starts inside object {}",
            o.id
        )));
    }

    let mut out = scene.clone();
    let mut outcome = PushOutcome::idle(scene);

    let target = scene
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.fallen)
        .filter_map(|(i, o)| o.footprint().ray_entry(push.start, dir).map(|t| (i, t)))
        .filter(|(_, t)| *t <= cfg.max_reach)
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let Some((target_idx, _)) = target else {
        return Ok((out, outcome));
    };
    outcome.target = Some(scene.objects[target_idx].id);

    let n_steps = (push.length / cfg.step).ceil().max(1.0) as usize;
    let delta = push.length / n_steps as f64;
    let mut offsets = vec![Vector2::zeros(); out.objects.len()];

    for _ in 0..n_steps {
        let snapshot = offsets.clone();
        offsets[target_idx] += dir * delta;
        if !resolve(&out, &mut offsets, target_idx, dir, 0, cfg.max_chain_depth) {
            offsets = snapshot;
            outcome.blocked = true;
            break;
        }
    }

    for (i, obj) in out.objects.iter_mut().enumerate() {
        obj.pose.x += offsets[i].x;
        obj.pose.y += offsets[i].y;
        outcome.displacements[i].dx = offsets[i].x;
        outcome.displacements[i].dy = offsets[i].y;
        if i != target_idx && offsets[i].norm() > 0.0 {
            outcome.secondary_contacts += 1;
        }
    }
    for (i, obj) in out.objects.iter_mut().enumerate() {
        if obj.fallen {
            continue;
        }
        let forced = i != target_idx && offsets[i].norm() > cfg.fall_threshold;
        if forced || !scene.shelf.contains(&obj.footprint()) {
            obj.fallen = true;
            outcome.fallen.push(obj.id);
        }
    }
    Ok((out, outcome))
}

/// Clears every object penetrated by `mover`; false when a chain would
/// exceed `max_depth`.
fn resolve(
    scene: &Scene,
    offsets: &mut [Vector2<f64>],
    mover: usize,
    dir: Vector2<f64>,
    depth: usize,
    max_depth: usize,
) -> bool {
    let fp_of =
        |i: usize, offsets: &[Vector2<f64>]| scene.objects[i].footprint().translated(offsets[i]);
    for j in 0..scene.objects.len() {
        if j == mover || scene.objects[j].fallen {
            continue;
        }
        let m = fp_of(mover, offsets);
        let other = fp_of(j, offsets);
        if !m.overlaps(&other) {
            continue;
        }
        if depth >= max_depth {
            return false;
        }
        let t = m.clearance_along(&other, dir);
        offsets[j] += dir * t;
        if !resolve(scene, offsets, j, dir, depth + 1, max_depth) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Pose2, SceneObject, Shape, Shelf};
    use approx::assert_abs_diff_eq;

    fn boxed(id: u32, x: f64, y: f64, s: f64) -> SceneObject {
        SceneObject {
            id,
            class: 1,
            shape: Shape::Box {
                size_x: s,
                size_y: s,
            },
            height: 0.1,
            pose: Pose2 { x, y, yaw: 0.0 },
            fallen: false,
        }
    }

    fn push(start: (f64, f64), dir: (f64, f64), length: f64) -> PushCandidate {
        PushCandidate {
            start: Vector2::new(start.0, start.1),
            direction: Vector2::new(dir.0, dir.1),
            length,
            target_object: 0,
            predicted_vig: 0.0,
        }
    }

    #[test]
    fn lone_push_moves_only_target() {
        let mut s = Scene::empty(Shelf::default());
        s.objects.push(boxed(0, 0.3, 0.2, 0.04));
        s.objects.push(boxed(1, 0.6, 0.2, 0.04));
        let (after, out) = apply_push(
            &s,
            &push((0.3, 0.15), (0.0, 1.0), 0.05),
            &DynamicsConfig::default(),
        )
        .unwrap();
        assert_eq!(out.target, Some(0));
        assert_abs_diff_eq!(out.displacements[0].dy, 0.05, epsilon = 1e-12);
        assert_eq!(out.displacements[1].magnitude(), 0.0);
        assert_eq!(out.secondary_contacts, 0);
        assert!(out.fallen.is_empty());
        assert_abs_diff_eq!(after.objects[0].pose.y, 0.25, epsilon = 1e-12);
        assert!(!check_termination_fall(&out));
    }

    #[test]
    fn start_inside_is_rejected() {
        let mut s = Scene::empty(Shelf::default());
        s.objects.push(boxed(0, 0.3, 0.2, 0.04));
        let r = apply_push(
            &s,
            &push((0.3, 0.2), (0.0, 1.0), 0.05),
            &DynamicsConfig::default(),
        );
        assert!(matches!(r, Err(Error::PushPrecondition(_))));
    }

    #[test]
    fn front_edge_fall() {
        let mut s = Scene::empty(Shelf::default());
        s.objects.push(boxed(0, 0.3, 0.05, 0.04));
        let (after, out) = apply_push(
            &s,
            &push((0.3, 0.1), (0.0, -1.0), 0.06),
            &DynamicsConfig::default(),
        )
        .unwrap();
        assert_eq!(out.fallen, vec![0]);
        assert!(after.objects[0].fallen);
        assert!(check_termination_fall(&out));
    }
}
