use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's contract (shape mismatch, bad index, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("value out of range for {field}: {value}")]
    Range { field: &'static str, value: f64 },

    #[error("scene generation failed for seed {seed}: {reason}")]
    SceneGeneration { seed: u64, reason: String },

    #[error("push precondition violated: {0}")]
    PushPrecondition(String),

    #[error("object {0} not found in belief segmentation")]
    Segmentation(u32),

    #[error("planning failed: {0}")]
    Planning(String),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("replay diverged at step {step}: {detail}")]
    ReplayMismatch { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
