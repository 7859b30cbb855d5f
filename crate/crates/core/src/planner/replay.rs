use super::episode::{episode_end, SimState};
use super::log::scene_digest;
use super::EpisodeLog;
use crate::error::{Error, Result};

/// Replay tolerance on every logged metric.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub steps: usize,
    pub final_occ_miou: f64,
    pub final_sem_miou: f64,
}

/// Re-executes the logged actions from the logged scene and checks that every
/// step reproduces the logged metrics, rewards and push outcomes.
pub fn replay_episode(log: &EpisodeLog) -> Result<ReplayReport> {
    let h = &log.header;
    if scene_digest(&h.scene) != h.scene_digest {
        return Err(Error::ReplayMismatch {
            step: 0,
            detail: "stored scene does not match its digest".into(),
        });
    }
    let settings = &h.settings;
    let mut state = SimState::new(&h.scene, settings)?;
    for rec in &log.steps {
        let mismatch = |detail: String| Error::ReplayMismatch {
            step: rec.step,
            detail,
        };
        let effect = state.execute(&rec.action, settings, h.planner_seed, rec.step)?;
        if effect.feasible != rec.feasible {
            return Err(mismatch(format!(
                "feasibility: logged {} vs replayed {}",
                rec.feasible, effect.feasible
            )));
        }
        if effect.outcome != rec.push_outcome {
            return Err(mismatch("push outcome differs".into()));
        }
        let r = effect.reward;
        for (name, a, b) in [
            ("r_uncertainty", rec.reward.r_uncertainty, r.r_uncertainty),
            ("r_repeat", rec.reward.r_repeat, r.r_repeat),
            ("reward", rec.reward.total, r.total),
        ] {
            if !((a - b).abs() <= REPLAY_TOLERANCE) {
                return Err(mismatch(format!("{name}: logged {a} vs replayed {b}")));
            }
        }
        let m = state.metrics(settings)?;
        if let Some(d) = rec.metrics.first_difference(&m, REPLAY_TOLERANCE) {
            return Err(mismatch(d));
        }
    }
    let end = episode_end(
        &state,
        settings,
        log.end.terminal,
        log.steps.len(),
        log.end.error.clone(),
    )?;
    let e = &log.end;
    let fin = |detail: String| Error::ReplayMismatch {
        step: log.steps.len(),
        detail,
    };
    if end.steps != e.steps {
        return Err(fin(format!(
            "step count: logged {} vs replayed {}",
            e.steps, end.steps
        )));
    }
    for (name, a, b) in [
        ("final occ_miou", e.occ_miou, end.occ_miou),
        ("final sem_miou", e.sem_miou, end.sem_miou),
        ("final mad", e.mad, end.mad),
    ] {
        if !((a - b).abs() <= REPLAY_TOLERANCE) {
            return Err(fin(format!("{name}: logged {a} vs replayed {b}")));
        }
    }
    if (e.num_push, e.collided, e.fell) != (end.num_push, end.collided, end.fell) {
        return Err(fin("push counters differ".into()));
    }
    Ok(ReplayReport {
        steps: end.steps,
        final_occ_miou: end.occ_miou,
        final_sem_miou: end.sem_miou,
    })
}
