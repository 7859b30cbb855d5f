use serde::{Deserialize, Serialize};

use super::observation::ViewHistory;
use super::pose::ViewPose;
use crate::belief::{BeliefState, BeliefSummary, PRIOR_VARIANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    pub w1: f64,
    pub w2: f64,
    pub gamma_p: f64,
    pub gamma_e: f64,
    /// Position gate in meters.
    pub theta_p: f64,
    /// Orientation gate on the cosine distance of view directions.
    pub theta_e: f64,
    pub r_feasibility: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            w1: 10.0,
            w2: 2.0,
            gamma_p: 0.5,
            gamma_e: 0.5,
            theta_p: 0.1,
            theta_e: 0.034,
            r_feasibility: 1.0,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("reward.w1", self.w1),
            ("reward.w2", self.w2),
            ("reward.gamma_p", self.gamma_p),
            ("reward.gamma_e", self.gamma_e),
            ("reward.theta_p", self.theta_p),
            ("reward.theta_e", self.theta_e),
            ("reward.r_feasibility", self.r_feasibility),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Euclidean distance between camera positions and cosine distance between
/// viewing directions.
pub fn view_distances(a: &ViewPose, b: &ViewPose) -> (f64, f64) {
    let p = (a.cam - b.cam).norm();
    let e = match (a.direction(), b.direction()) {
        (Some(da), Some(db)) => (1.0 - da.dot(&db)).max(0.0),
        _ => 2.0,
    };
    (p, e)
}

/// Penalty for revisiting a past view; only entries within both gates count.
pub fn repeat_penalty_term(p_dist: f64, e_dist: f64, cfg: &RewardConfig) -> f64 {
    if p_dist <= cfg.theta_p && e_dist <= cfg.theta_e {
        -(cfg.gamma_p * (cfg.theta_p - p_dist) / cfg.theta_p
            + cfg.gamma_e * (cfg.theta_e - e_dist) / cfg.theta_e)
    } else {
        0.0
    }
}

pub fn repeat_penalty(v: &ViewPose, history: &ViewHistory, cfg: &RewardConfig) -> f64 {
    history
        .entries()
        .map(|e| {
            let (p, d) = view_distances(v, &e.pose);
            repeat_penalty_term(p, d, cfg)
        })
        .sum()
}

/// Drop in mean uncertainty, each channel normalized by its prior value.
pub fn uncertainty_reward_from(before: &BeliefSummary, after: &BeliefSummary) -> f64 {
    (before.mean_u_o - after.mean_u_o) / PRIOR_VARIANCE + (before.mean_u_s - after.mean_u_s)
}

pub fn uncertainty_reward(before: &BeliefState, after: &BeliefState) -> Result<f64> {
    if !before.grid().same_shape(after.grid()) || before.n_classes() != after.n_classes() {
        return Err(Error::Contract("beliefs live on different grids".into()));
    }
    Ok(uncertainty_reward_from(&before.summary(), &after.summary()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub feasible: bool,
    pub r_uncertainty: f64,
    pub r_repeat: f64,
}

pub fn step_reward(t: &Transition, cfg: &RewardConfig) -> f64 {
    if t.feasible {
        cfg.w1 * t.r_uncertainty + cfg.w2 * t.r_repeat
    } else {
        -cfg.r_feasibility
    }
}
