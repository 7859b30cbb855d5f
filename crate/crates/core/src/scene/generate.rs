//! Procedural shelf scenes.
//!
//! Object dimensions are drawn first; objects larger than the median
//! footprint area then take their depth from a front-weighted triangular
//! distribution and the rest from a back-weighted one, so big items tend to
//! hide small ones. Placement is rejection sampled, largest first.

use nalgebra::Vector2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Footprint, Pose2, Scene, SceneObject, Shape, Shelf};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Box,
    Cylinder,
}

/// One object type. For cylinders `size_x` is the diameter range and
/// `size_y` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    pub class: u16,
    pub shape: ShapeKind,
    pub size_x: [f64; 2],
    pub size_y: [f64; 2],
    pub height: [f64; 2],
}

/// A row of tall boxes across the front of the shelf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    /// Number of boxes in the wall.
    pub segments: usize,
    /// Fraction of the shelf width covered by the wall.
    pub coverage: f64,
    /// Depth of the wall's front face.
    pub front: f64,
    pub thickness: [f64; 2],
    pub height: [f64; 2],
    pub class: u16,
}

impl Default for WallSpec {
    fn default() -> Self {
        WallSpec {
            segments: 3,
            coverage: 0.6,
            front: 0.02,
            thickness: [0.03, 0.04],
            height: [0.16, 0.19],
            class: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneGenConfig {
    pub n_objects_min: usize,
    pub n_objects_max: usize,
    pub shelf: Shelf,
    pub catalog: Vec<CatalogEntry>,
    /// Minimum separation between footprints at generation time.
    pub min_gap: f64,
    pub max_attempts: usize,
    pub wall: Option<WallSpec>,
}

impl Default for SceneGenConfig {
    fn default() -> Self {
        SceneGenConfig {
            n_objects_min: 15,
            n_objects_max: 30,
            shelf: Shelf::default(),
            catalog: default_catalog(),
            min_gap: 0.01,
            max_attempts: 4000,
            wall: None,
        }
    }
}

impl SceneGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_objects_min < 15 || self.n_objects_min > 30 {
            return Err(Error::config(
                "scene.n_objects_min",
                "must be within [15, 30]",
            ));
        }
        if self.n_objects_max < self.n_objects_min || self.n_objects_max > 30 {
            return Err(Error::config(
                "scene.n_objects_max",
                "must be within [n_objects_min, 30]",
            ));
        }
        if self.catalog.is_empty() {
            return Err(Error::config("scene.catalog", "must not be empty"));
        }
        for (i, e) in self.catalog.iter().enumerate() {
            let ranges = [e.size_x, e.size_y, e.height];
            if ranges.iter().any(|r| !(r[0] > 0.0 && r[1] >= r[0])) {
                return Err(Error::config(
                    format!("scene.catalog[{i}]"),
                    "size ranges must be positive and ordered",
                ));
            }
            if e.class == crate::FREE_CLASS {
                return Err(Error::config(
                    format!("scene.catalog[{i}].class"),
                    "class 0 is reserved for free space",
                ));
            }
        }
        let s = self.shelf;
        if !(s.width > 0.0 && s.depth > 0.0 && s.height > 0.0) {
            return Err(Error::config("scene.shelf", "dimensions must be positive"));
        }
        if !(self.min_gap >= 0.0) {
            return Err(Error::config("scene.min_gap", "must be non-negative"));
        }
        if let Some(w) = &self.wall {
            if w.segments == 0 || !(w.coverage > 0.0 && w.coverage <= 1.0) {
                return Err(Error::config(
                    "scene.wall",
                    "needs segments and coverage in (0, 1]",
                ));
            }
        }
        Ok(())
    }

    /// Object count for a seed, uniform in `[n_objects_min, n_objects_max]`.
    pub fn object_count(&self, seed: u64) -> usize {
        let mut rng = crate::rng::derive(seed, 0, crate::rng::Stream::Scene);
        rng.gen_range(self.n_objects_min..=self.n_objects_max)
    }
}

/// YCB-like household items sized for the default shelf.
pub fn default_catalog() -> Vec<CatalogEntry> {
    use ShapeKind::*;
    let e = |name: &str, class, shape, sx: [f64; 2], sy: [f64; 2], h: [f64; 2]| CatalogEntry {
        name: name.to_string(),
        class,
        shape,
        size_x: sx,
        size_y: sy,
        height: h,
    };
    vec![
        e(
            "cereal_box",
            1,
            Box,
            [0.07, 0.10],
            [0.03, 0.05],
            [0.14, 0.19],
        ),
        e(
            "cracker_box",
            2,
            Box,
            [0.06, 0.08],
            [0.04, 0.06],
            [0.12, 0.17],
        ),
        e(
            "sugar_box",
            3,
            Box,
            [0.04, 0.06],
            [0.03, 0.04],
            [0.10, 0.15],
        ),
        e(
            "soup_can",
            4,
            Cylinder,
            [0.05, 0.07],
            [0.0, 0.0],
            [0.07, 0.10],
        ),
        e(
            "coffee_can",
            5,
            Cylinder,
            [0.08, 0.10],
            [0.0, 0.0],
            [0.10, 0.14],
        ),
        e(
            "mustard_bottle",
            6,
            Box,
            [0.05, 0.06],
            [0.03, 0.04],
            [0.12, 0.16],
        ),
        e(
            "tuna_can",
            7,
            Cylinder,
            [0.06, 0.08],
            [0.0, 0.0],
            [0.03, 0.04],
        ),
        e(
            "pudding_box",
            8,
            Box,
            [0.04, 0.06],
            [0.04, 0.06],
            [0.03, 0.05],
        ),
        e(
            "gelatin_box",
            9,
            Box,
            [0.04, 0.05],
            [0.03, 0.04],
            [0.02, 0.04],
        ),
        e("mug", 10, Cylinder, [0.06, 0.08], [0.0, 0.0], [0.06, 0.09]),
        e("cup", 11, Cylinder, [0.04, 0.06], [0.0, 0.0], [0.05, 0.08]),
    ]
    .into_iter()
    .map(|mut c| {
        if c.shape == Cylinder {
            c.size_y = c.size_x;
        }
        c
    })
    .collect()
}

struct Draft {
    class: u16,
    shape: Shape,
    height: f64,
}

fn uniform(rng: &mut crate::rng::Rng, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.gen_range(r[0]..r[1])
    } else {
        r[0]
    }
}

/// Triangular sample on `[lo, hi]` with the mode at `lo` (front) or `hi` (back).
fn triangular(rng: &mut crate::rng::Rng, lo: f64, hi: f64, mode_at_low: bool) -> f64 {
    let u: f64 = rng.gen();
    let t = 1.0 - (1.0 - u).sqrt();
    if mode_at_low {
        lo + (hi - lo) * t
    } else {
        hi - (hi - lo) * t
    }
}

pub fn generate_scene(seed: u64, n_objects: usize, cfg: &SceneGenConfig) -> Result<Scene> {
    if !(15..=30).contains(&n_objects) {
        return Err(Error::config(
            "n_objects",
            format!("{n_objects} is outside [15, 30]"),
        ));
    }
    if cfg.catalog.is_empty() {
        return Err(Error::config("scene.catalog", "must not be empty"));
    }
    let mut rng = rng_from_seed(seed);
    let shelf = cfg.shelf;
    let mut placed: Vec<SceneObject> = Vec::with_capacity(n_objects);

    if let Some(wall) = &cfg.wall {
        place_wall(&mut rng, wall, cfg, &mut placed);
    }
    let remaining = n_objects.saturating_sub(placed.len());

    let drafts: Vec<Draft> = (0..remaining)
        .map(|_| {
            let entry = &cfg.catalog[rng.gen_range(0..cfg.catalog.len())];
            let shape = match entry.shape {
                ShapeKind::Box => Shape::Box {
                    size_x: uniform(&mut rng, entry.size_x),
                    size_y: uniform(&mut rng, entry.size_y),
                },
                ShapeKind::Cylinder => Shape::Cylinder {
                    radius: 0.5 * uniform(&mut rng, entry.size_x),
                },
            };
            Draft {
                class: entry.class,
                shape,
                height: uniform(&mut rng, entry.height).min(shelf.height),
            }
        })
        .collect();

    let mut areas: Vec<f64> = drafts.iter().map(|d| d.shape.area()).collect();
    areas.sort_by(f64::total_cmp);
    let median = if areas.is_empty() {
        0.0
    } else if areas.len() % 2 == 1 {
        areas[areas.len() / 2]
    } else {
        0.5 * (areas[areas.len() / 2 - 1] + areas[areas.len() / 2])
    };

    let mut order: Vec<usize> = (0..drafts.len()).collect();
    order.sort_by(|&a, &b| {
        drafts[b]
            .shape
            .area()
            .total_cmp(&drafts[a].shape.area())
            .then(a.cmp(&b))
    });

    let first_id = placed.len() as u32;
    let mut new_objects: Vec<(usize, SceneObject)> = Vec::with_capacity(drafts.len());
    for &i in &order {
        let d = &drafts[i];
        let half = d.shape.half_extents();
        let front_biased = d.shape.area() > median;
        let (x_lo, x_hi) = (half.x, shelf.width - half.x);
        let (y_lo, y_hi) = (half.y, shelf.depth - half.y);
        if x_hi <= x_lo || y_hi <= y_lo {
            return Err(Error::SceneGeneration {
                seed,
                reason: format!("object of class {} does not fit the shelf", d.class),
            });
        }
        let mut done = false;
        for _ in 0..cfg.max_attempts {
            let x = rng.gen_range(x_lo..x_hi);
            let y = triangular(&mut rng, y_lo, y_hi, front_biased);
            let fp = Footprint::new(Vector2::new(x, y), d.shape);
            let clear = placed
                .iter()
                .chain(new_objects.iter().map(|(_, o)| o))
                .all(|o| o.footprint().separation(&fp) >= cfg.min_gap);
            if clear && shelf.contains(&fp) {
                new_objects.push((
                    i,
                    SceneObject {
                        id: first_id + i as u32,
                        class: d.class,
                        shape: d.shape,
                        height: d.height,
                        pose: Pose2 { x, y, yaw: 0.0 },
                        fallen: false,
                    },
                ));
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::SceneGeneration {
                seed,
                reason: format!(
                    "could not place object {} of {} after {} attempts",
                    new_objects.len() + placed.len() + 1,
                    n_objects,
                    cfg.max_attempts
                ),
            });
        }
    }
    new_objects.sort_by_key(|(i, _)| *i);
    placed.extend(new_objects.into_iter().map(|(_, o)| o));

    Ok(Scene {
        shelf,
        objects: placed,
        rng_seed: seed,
    })
}

fn place_wall(
    rng: &mut crate::rng::Rng,
    wall: &WallSpec,
    cfg: &SceneGenConfig,
    placed: &mut Vec<SceneObject>,
) {
    let shelf = cfg.shelf;
    let span = wall.coverage * shelf.width;
    let x0 = rng.gen_range(0.0..=(shelf.width - span).max(0.0));
    let n = wall.segments;
    let seg_width = (span - cfg.min_gap * (n as f64 - 1.0)) / n as f64;
    for k in 0..n {
        let thickness = uniform(rng, wall.thickness);
        let height = uniform(rng, wall.height).min(shelf.height);
        let cx = x0 + k as f64 * (seg_width + cfg.min_gap) + 0.5 * seg_width;
        placed.push(SceneObject {
            id: placed.len() as u32,
            class: wall.class,
            shape: Shape::Box {
                size_x: seg_width,
                size_y: thickness,
            },
            height,
            pose: Pose2 {
                x: cx,
                y: wall.front + 0.5 * thickness,
                yaw: 0.0,
            },
            fallen: false,
        });
    }
}
