//! Versioned experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{EpisodeSettings, Method};
use crate::scene::SceneGenConfig;

pub const CONFIG_VERSION: u32 = 1;

/// Environment variable naming the config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "SHELFMEM_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub scene: SceneBlock,
    #[serde(default)]
    pub episode: EpisodeSettings,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Added to each scene seed to get the planner seed.
    #[serde(default)]
    pub planner_seed: u64,
    #[serde(default)]
    pub output: OutputBlock,
}

fn default_methods() -> Vec<Method> {
    vec![Method::InformedPush, Method::RandomPush]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneBlock {
    /// First scene seed; scenes use `seed_start..seed_start + count`.
    pub seed_start: u64,
    pub count: usize,
    pub generator: SceneGenConfig,
}

impl Default for SceneBlock {
    fn default() -> Self {
        SceneBlock {
            seed_start: 0,
            count: 25,
            generator: SceneGenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Write final belief panels as PGM images.
    pub pgm: bool,
    /// Write the final belief of each episode as a binary snapshot.
    pub belief_snapshots: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            pgm: false,
            belief_snapshots: false,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            scene: SceneBlock::default(),
            episode: EpisodeSettings::default(),
            methods: default_methods(),
            planner_seed: 0,
            output: OutputBlock::default(),
        }
    }
}

/// Re-roots a config error under `prefix`.
fn nest(prefix: &str, e: Error) -> Error {
    match e {
        Error::Config { field, reason } => Error::Config {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        if self.scene.count == 0 {
            return Err(Error::config("scene.count", "must be at least 1"));
        }
        if self.scene.seed_start.checked_add(self.scene.count as u64).is_none() {
            return Err(Error::config("scene.seed_start", "seed range overflows"));
        }
        self.scene
            .generator
            .validate()
            .map_err(|e| match e {
                Error::Config { field, reason } => Error::Config {
                    field: field.replacen("scene.", "scene.generator.", 1),
                    reason,
                },
                other => other,
            })?;
        self.episode.validate().map_err(|e| nest("episode", e))?;
        if self.methods.is_empty() {
            return Err(Error::config("methods", "must name at least one method"));
        }
        let mut seen = self.methods.clone();
        seen.sort_by_key(|m| m.name());
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::config("methods", "must not repeat a method"));
        }
        if self.episode.grid.n_cells() == 0 {
            return Err(Error::config("episode.grid", "must not be empty"));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        self.scene.seed_start..self.scene.seed_start + self.scene.count as u64
    }

    pub fn planner_seed_for(&self, scene_seed: u64) -> u64 {
        scene_seed.wrapping_add(self.planner_seed)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            field: "<document>".into(),
            reason: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}
