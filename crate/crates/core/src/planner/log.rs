//! JSON-lines episode logs: one header line, one line per step, one end line.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ActionKind, EpisodeSettings, Method};
use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::push::{PushCandidate, PushTelemetry};
use crate::scene::{PushOutcome, Scene};
use crate::view::ViewPose;

pub const LOG_FORMAT: &str = "shelfmem-episode";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeHeader {
    pub format: String,
    pub version: u32,
    pub method: Method,
    pub scene_seed: u64,
    pub planner_seed: u64,
    pub scene_digest: String,
    pub settings: EpisodeSettings,
    /// The scene the episode started from, so a log replays on its own.
    pub scene: Scene,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LoggedAction {
    View {
        pose: ViewPose,
        /// Normalized action in `[-1, 1]^6`.
        action: [f64; 6],
    },
    Push {
        push: PushCandidate,
    },
}

impl LoggedAction {
    pub fn kind(&self) -> ActionKind {
        match self {
            LoggedAction::View { .. } => ActionKind::View,
            LoggedAction::Push { .. } => ActionKind::Push,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardTerms {
    pub r_uncertainty: f64,
    pub r_repeat: f64,
    pub total: f64,
}

/// Belief quality after a step, measured against the current ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub occ_miou: f64,
    pub sem_miou: f64,
    pub certainty: f64,
    pub mean_u_o: f64,
    pub mean_u_s: f64,
    /// Cumulative object displacement so far, meters.
    pub displacement: f64,
    /// Digest of the column occupancy map and hard labels.
    pub belief_digest: String,
}

impl StepMetrics {
    /// First field that differs by more than `tol`, if any.
    pub fn first_difference(&self, other: &StepMetrics, tol: f64) -> Option<String> {
        let pairs = [
            ("occ_miou", self.occ_miou, other.occ_miou),
            ("sem_miou", self.sem_miou, other.sem_miou),
            ("certainty", self.certainty, other.certainty),
            ("mean_u_o", self.mean_u_o, other.mean_u_o),
            ("mean_u_s", self.mean_u_s, other.mean_u_s),
            ("displacement", self.displacement, other.displacement),
        ];
        for (name, a, b) in pairs {
            if !((a - b).abs() <= tol) {
                return Some(format!("{name}: logged {a} vs replayed {b}"));
            }
        }
        if self.belief_digest != other.belief_digest {
            return Some("belief digest differs".into());
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub action: LoggedAction,
    pub vig_nbv: f64,
    /// Best push VIG when pushes were considered this step.
    pub vig_push: Option<f64>,
    pub n_push_candidates: usize,
    pub candidate_vigs: Vec<f64>,
    /// For views: pose passed the feasibility check. For pushes: the pusher
    /// started in free space.
    pub feasible: bool,
    pub push_outcome: Option<PushOutcome>,
    pub push_telemetry: Option<PushTelemetry>,
    pub reward: RewardTerms,
    pub metrics: StepMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    Budget,
    Certainty,
    Fall,
    Error,
}

impl Terminal {
    pub fn name(&self) -> &'static str {
        match self {
            Terminal::Budget => "budget",
            Terminal::Certainty => "certainty",
            Terminal::Fall => "fall",
            Terminal::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeEnd {
    pub terminal: Terminal,
    pub steps: usize,
    pub occ_miou: f64,
    pub sem_miou: f64,
    pub mad: f64,
    pub num_push: usize,
    pub collided: bool,
    pub fell: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LogLine {
    Header(Box<EpisodeHeader>),
    Step(Box<StepRecord>),
    End(EpisodeEnd),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: EpisodeHeader,
    pub steps: Vec<StepRecord>,
    pub end: EpisodeEnd,
}

impl EpisodeLog {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut put = |line: LogLine| {
            out.push_str(&serde_json::to_string(&line).expect("log lines serialize"));
            out.push('\n');
        };
        put(LogLine::Header(Box::new(self.header.clone())));
        for s in &self.steps {
            put(LogLine::Step(Box::new(s.clone())));
        }
        put(LogLine::End(self.end.clone()));
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut end = None;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: LogLine = serde_json::from_str(line)
                .map_err(|e| Error::Format(format!("log line {}: {e}", i + 1)))?;
            match parsed {
                LogLine::Header(h) if header.is_none() && steps.is_empty() => header = Some(*h),
                LogLine::Step(s) if header.is_some() && end.is_none() => steps.push(*s),
                LogLine::End(e) if header.is_some() && end.is_none() => end = Some(e),
                _ => return Err(Error::Format(format!("log line {}: out of order", i + 1))),
            }
        }
        let header = header.ok_or_else(|| Error::Format("log has no header".into()))?;
        if header.format != LOG_FORMAT || header.version != LOG_VERSION {
            return Err(Error::Format(format!(
                "unsupported log format {} v{}",
                header.format, header.version
            )));
        }
        let end = end.ok_or_else(|| Error::Format("log has no end line".into()))?;
        for (i, s) in steps.iter().enumerate() {
            if s.step != i {
                return Err(Error::Format(format!(
                    "step {} logged at position {i}",
                    s.step
                )));
            }
        }
        Ok(EpisodeLog { header, steps, end })
    }

    pub fn actions(&self) -> impl Iterator<Item = &LoggedAction> {
        self.steps.iter().map(|s| &s.action)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn scene_digest(scene: &Scene) -> String {
    sha256_hex(scene.to_canonical_json().as_bytes())
}

pub(crate) fn belief_digest(belief: &BeliefState) -> String {
    let mut bytes = Vec::new();
    for p in belief.occupancy_map() {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    for l in belief.hard_labels() {
        bytes.extend_from_slice(&l.to_le_bytes());
    }
    sha256_hex(&bytes)
}
