//! Ground-truth shelf worlds.

mod dynamics;
mod footprint;
mod generate;
mod truth;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub use dynamics::{apply_push, check_termination_fall, DynamicsConfig, PushOutcome};
pub use footprint::{Footprint, Shape};
pub use generate::{
    default_catalog, generate_scene, CatalogEntry, SceneGenConfig, ShapeKind, WallSpec,
};
pub use truth::{ground_truth_maps, GroundTruth};

use crate::error::{Error, Result};

/// Shelf interior. The open front face is the line `y = 0`; side walls sit
/// at `x = 0` and `x = width`, the back wall at `y = depth`, and the board
/// at `z = 0`. The top is open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shelf {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl Default for Shelf {
    fn default() -> Self {
        Shelf {
            width: 0.785,
            depth: 0.41,
            height: 0.2,
        }
    }
}

impl Shelf {
    /// True when the footprint lies entirely inside the shelf interior.
    pub fn contains(&self, fp: &Footprint) -> bool {
        let (lo, hi) = fp.aabb();
        lo.x >= 0.0 && lo.y >= 0.0 && hi.x <= self.width && hi.y <= self.depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    /// Kept for the file format; the dynamics never rotate objects.
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: u32,
    pub class: u16,
    pub shape: Shape,
    pub height: f64,
    pub pose: Pose2,
    /// Set once a push knocks the object over; it no longer occupies the shelf.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallen: bool,
}

impl SceneObject {
    pub fn center(&self) -> Vector2<f64> {
        Vector2::new(self.pose.x, self.pose.y)
    }

    pub fn footprint(&self) -> Footprint {
        Footprint::new(self.center(), self.shape)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub shelf: Shelf,
    pub objects: Vec<SceneObject>,
    pub rng_seed: u64,
}

impl Scene {
    pub fn empty(shelf: Shelf) -> Self {
        Scene {
            shelf,
            objects: Vec::new(),
            rng_seed: 0,
        }
    }

    pub fn object(&self, id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Objects still standing on the shelf.
    pub fn standing(&self) -> impl Iterator<Item = &SceneObject> {
        self.objects.iter().filter(|o| !o.fallen)
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u32> = self.objects.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("duplicate object id".into()));
        }
        for o in &self.objects {
            if !o.shape.is_valid() || !(o.height > 0.0) {
                return Err(Error::Format(format!(
                    "object {} has a degenerate shape",
                    o.id
                )));
            }
        }
        Ok(())
    }

    /// First standing object whose footprint contains the point.
    pub fn object_at(&self, p: Vector2<f64>) -> Option<&SceneObject> {
        self.standing().find(|o| o.footprint().contains(p))
    }
}
