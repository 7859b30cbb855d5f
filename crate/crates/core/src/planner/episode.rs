use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::log::{belief_digest, scene_digest, Terminal};
use super::{
    arbitrate, map_certainty, ActionKind, EpisodeEnd, EpisodeHeader, EpisodeLog, EpisodeSettings,
    LoggedAction, Method, RewardTerms, StepMetrics, StepRecord, LOG_FORMAT, LOG_VERSION,
};
use crate::belief::BeliefState;
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::metrics::{occupancy_miou, semantic_miou, RunMetrics};
use crate::push::{
    adopt_push_forecast, informed_candidates, random_push_candidates, score_candidates,
    PushCandidate, PushContext, PushTelemetry,
};
use crate::rng::{derive, Stream};
use crate::scene::{apply_push, ground_truth_maps, GroundTruth, PushOutcome, Scene};
use crate::sensor::{apply_class_noise, integrate_observation, render_view};
use crate::view::{
    encode_observation, feasibility, greedy_nbv, normalized_height_map, random_view,
    repeat_penalty, step_reward, uncertainty_reward_from, ActionBoxes, HistoryEntry, PolicyInput,
    PolicySeam, Transition, ViewHistory, ViewPolicy, VigEvaluator,
};

/// Wall-clock cost of one decision. Kept out of the episode log so logs stay
/// byte-identical across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub step: usize,
    pub view_seconds: f64,
    /// Present when the push pipeline ran.
    pub push_seconds: Option<f64>,
}

/// Simulator plus belief: everything an action changes.
#[derive(Debug, Clone)]
pub struct SimState {
    pub scene: Scene,
    pub gt: GroundTruth,
    pub belief: BeliefState,
    pub history: ViewHistory,
    pub boxes: ActionBoxes,
    pub mad: f64,
    pub num_push: usize,
    pub collided: bool,
    pub fell: bool,
    /// Starts of pushes that found the pusher inside an object.
    pub failed_starts: Vec<Vector2<f64>>,
}

/// What executing one action did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEffect {
    pub feasible: bool,
    pub outcome: Option<PushOutcome>,
    pub reward: RewardTerms,
}

impl SimState {
    pub fn new(scene: &Scene, settings: &EpisodeSettings) -> Result<Self> {
        settings.validate()?;
        scene.validate()?;
        let boxes = settings
            .boxes
            .unwrap_or_else(|| ActionBoxes::for_shelf_width(scene.shelf.width));
        Ok(SimState {
            scene: scene.clone(),
            gt: ground_truth_maps(scene, &settings.grid),
            belief: BeliefState::new(settings.grid, settings.n_classes)?,
            history: ViewHistory::new(settings.planner.n_hist),
            boxes,
            mad: 0.0,
            num_push: 0,
            collided: false,
            fell: false,
            failed_starts: Vec::new(),
        })
    }

    /// Executes `action` in the simulator and updates the belief.
    pub fn execute(
        &mut self,
        action: &LoggedAction,
        settings: &EpisodeSettings,
        seed: u64,
        step: usize,
    ) -> Result<StepEffect> {
        let before = self.belief.summary();
        let (feasible, outcome, r_repeat) = match action {
            LoggedAction::View { pose, action } => {
                let feasible = feasibility(pose, &self.boxes, &self.gt);
                let r_repeat = repeat_penalty(pose, &self.history, &settings.reward);
                if feasible {
                    let mut obs = render_view(&self.gt, pose, &settings.camera);
                    if settings.class_noise > 0.0 {
                        let mut rng = derive(seed, step as u64, Stream::SensorNoise);
                        apply_class_noise(
                            &mut obs,
                            settings.class_noise,
                            settings.n_classes,
                            &mut rng,
                        );
                    }
                    integrate_observation(&mut self.belief, &obs, &settings.fusion)?;
                    self.history.push(HistoryEntry {
                        pose: *pose,
                        action: *action,
                        height_map: normalized_height_map(
                            &self.belief,
                            settings.planner.theta_occ,
                        )?,
                    });
                }
                (feasible, None, r_repeat)
            }
            LoggedAction::Push { push } => {
                match apply_push(&self.scene, push, &settings.dynamics) {
                    Ok((scene, outcome)) => {
                        self.belief = adopt_push_forecast(&self.belief, push, &settings.push)?;
                        self.scene = scene;
                        self.gt = ground_truth_maps(&self.scene, &settings.grid);
                        self.num_push += 1;
                        self.mad += outcome.total_displacement();
                        self.collided |= outcome.collided();
                        self.fell |= !outcome.fallen.is_empty();
                        (true, Some(outcome), 0.0)
                    }
                    // The pusher would start inside an object: nothing happens.
                    Err(Error::PushPrecondition(_)) => {
                        self.failed_starts.push(push.start);
                        (false, None, 0.0)
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        let r_uncertainty = uncertainty_reward_from(&before, &self.belief.summary());
        let total = step_reward(
            &Transition {
                feasible,
                r_uncertainty,
                r_repeat,
            },
            &settings.reward,
        );
        Ok(StepEffect {
            feasible,
            outcome,
            reward: RewardTerms {
                r_uncertainty,
                r_repeat,
                total,
            },
        })
    }

    pub fn certainty(&self, settings: &EpisodeSettings) -> f64 {
        map_certainty(
            &self.belief,
            settings.push.sem_uncertainty_floor,
            settings.planner.occupancy_certainty_floor,
        )
    }

    pub fn metrics(&self, settings: &EpisodeSettings) -> Result<StepMetrics> {
        let s = self.belief.summary();
        Ok(StepMetrics {
            occ_miou: occupancy_miou(&self.belief, &self.gt, settings.planner.theta_occ)?,
            sem_miou: semantic_miou(&self.belief, &self.gt)?,
            certainty: self.certainty(settings),
            mean_u_o: s.mean_u_o,
            mean_u_s: s.mean_u_s,
            displacement: self.mad,
            belief_digest: belief_digest(&self.belief),
        })
    }
}

/// Output of [`Planner::select_action`].
#[derive(Debug, Clone)]
pub struct Decision {
    pub action: LoggedAction,
    pub vig_nbv: f64,
    pub vig_push: Option<f64>,
    pub n_push_candidates: usize,
    pub candidate_vigs: Vec<f64>,
    pub telemetry: Option<PushTelemetry>,
    pub timing: StepTiming,
}

pub struct Planner<'a> {
    pub settings: &'a EpisodeSettings,
    pub method: Method,
    pub seed: u64,
    evaluator: VigEvaluator,
    policy: Option<PolicySeam<Box<dyn ViewPolicy + 'a>>>,
}

impl<'a> Planner<'a> {
    pub fn new(settings: &'a EpisodeSettings, method: Method, seed: u64) -> Self {
        Planner {
            settings,
            method,
            seed,
            evaluator: settings
                .nbv
                .evaluator(&settings.camera, settings.planner.theta_occ),
            policy: None,
        }
    }

    /// Routes view selection through an external policy instead of the
    /// greedy search.
    pub fn with_policy(mut self, policy: Box<dyn ViewPolicy + 'a>) -> Self {
        self.policy = Some(PolicySeam::new(policy));
        self
    }

    /// Components the policy seam had to clamp so far.
    pub fn clamped_components(&self) -> usize {
        self.policy.as_ref().map_or(0, |p| p.clamped)
    }

    pub fn select_action(&mut self, state: &SimState, step: usize) -> Result<Decision> {
        let s = self.settings;
        let belief = &state.belief;
        let boxes = &state.boxes;
        let clock = Stopwatch::start();
        let (pose, action, vig_nbv, candidate_vigs) = match (&mut self.policy, self.method) {
            (_, Method::RandomView) => {
                let mut rng = derive(self.seed, step as u64, Stream::RandomView);
                let pose = random_view(belief, boxes, &s.nbv, s.planner.theta_occ, &mut rng)?;
                let vig = self.evaluator.expected_vig(belief, &pose);
                (pose, boxes.normalize(&pose)?, vig, Vec::new())
            }
            (Some(seam), _) => {
                let observation = encode_observation(belief, &state.history, s.planner.theta_occ)?;
                let action = seam.evaluate(&PolicyInput {
                    observation: &observation,
                    belief,
                    step,
                })?;
                let pose = boxes.denormalize(&action)?;
                let vig = self.evaluator.expected_vig(belief, &pose);
                (pose, action, vig, Vec::new())
            }
            (None, _) => {
                let mut rng = derive(self.seed, step as u64, Stream::ViewCandidates);
                let best = greedy_nbv(belief, boxes, &s.nbv, &mut self.evaluator, &mut rng)?;
                (
                    best.pose,
                    boxes.normalize(&best.pose)?,
                    best.vig,
                    best.candidate_vigs,
                )
            }
        };
        let view_seconds = clock.seconds();
        let view = LoggedAction::View { pose, action };

        let consider_push =
            self.method.pushes() && step > 0 && state.certainty(s) < s.planner.completion_certainty;
        let mut decision = Decision {
            action: view,
            vig_nbv,
            vig_push: None,
            n_push_candidates: 0,
            candidate_vigs,
            telemetry: None,
            timing: StepTiming {
                step,
                view_seconds,
                push_seconds: None,
            },
        };
        if !consider_push {
            return Ok(decision);
        }

        let clock = Stopwatch::start();
        let ctx = PushContext::new(belief, &s.push);
        let (mut candidates, telemetry) = match self.method {
            Method::InformedPush => {
                let (c, t) = informed_candidates(&ctx, &s.push, self.seed, step as u64)?;
                (c, Some(t))
            }
            _ => {
                let mut rng = derive(self.seed, step as u64, Stream::PushSampling);
                (random_push_candidates(&ctx, &s.push, &mut rng), None)
            }
        };
        let avoid = s.push.failed_start_radius * s.grid.resolution;
        candidates.retain(|c| state.failed_starts.iter().all(|f| (f - c.start).norm() > avoid));
        let best = score_candidates(
            belief,
            &ctx,
            &mut candidates,
            boxes,
            &s.push,
            &s.nbv,
            &mut self.evaluator,
            self.seed,
            step as u64,
        )?;
        decision.timing.push_seconds = Some(clock.seconds());
        decision.n_push_candidates = candidates.len();
        decision.telemetry = telemetry;
        if let Some(i) = best {
            let push: PushCandidate = candidates.swap_remove(i);
            decision.vig_push = Some(push.predicted_vig);
            if arbitrate(vig_nbv, decision.vig_push, s.planner.delta_view) == ActionKind::Push {
                decision.action = LoggedAction::Push { push };
            }
        }
        Ok(decision)
    }
}

#[derive(Debug, Clone)]
pub struct EpisodeRun {
    pub log: EpisodeLog,
    pub belief: BeliefState,
    pub scene: Scene,
    pub metrics: RunMetrics,
    pub timings: Vec<StepTiming>,
}

pub fn run_episode(
    scene: &Scene,
    settings: &EpisodeSettings,
    method: Method,
    seed: u64,
) -> Result<EpisodeRun> {
    drive(scene, settings, Planner::new(settings, method, seed))
}

/// Like [`run_episode`] but every view comes from `policy`.
pub fn run_episode_with_policy<'a>(
    scene: &Scene,
    settings: &'a EpisodeSettings,
    method: Method,
    seed: u64,
    policy: Box<dyn ViewPolicy + 'a>,
) -> Result<EpisodeRun> {
    drive(
        scene,
        settings,
        Planner::new(settings, method, seed).with_policy(policy),
    )
}

fn drive(scene: &Scene, settings: &EpisodeSettings, mut planner: Planner) -> Result<EpisodeRun> {
    let mut state = SimState::new(scene, settings)?;
    let header = EpisodeHeader {
        format: LOG_FORMAT.into(),
        version: LOG_VERSION,
        method: planner.method,
        scene_seed: scene.rng_seed,
        planner_seed: planner.seed,
        scene_digest: scene_digest(scene),
        settings: settings.clone(),
        scene: scene.clone(),
    };
    let mut steps = Vec::new();
    let mut timings = Vec::new();
    let mut terminal = Terminal::Budget;
    let mut error = None;
    for step in 0..settings.planner.action_budget {
        if step > 0 && state.certainty(settings) >= settings.planner.completion_certainty {
            terminal = Terminal::Certainty;
            break;
        }
        let record = planner.select_action(&state, step).and_then(|d| {
            let effect = state.execute(&d.action, settings, planner.seed, step)?;
            timings.push(d.timing);
            Ok(StepRecord {
                step,
                action: d.action,
                vig_nbv: d.vig_nbv,
                vig_push: d.vig_push,
                n_push_candidates: d.n_push_candidates,
                candidate_vigs: d.candidate_vigs,
                feasible: effect.feasible,
                push_outcome: effect.outcome,
                push_telemetry: d.telemetry,
                reward: effect.reward,
                metrics: state.metrics(settings)?,
            })
        });
        match record {
            Ok(r) => {
                let fell = r
                    .push_outcome
                    .as_ref()
                    .is_some_and(|o| !o.fallen.is_empty());
                steps.push(r);
                if fell && settings.planner.tof_enabled {
                    terminal = Terminal::Fall;
                    break;
                }
            }
            Err(e) => {
                terminal = Terminal::Error;
                error = Some(e.to_string());
                break;
            }
        }
    }
    let end = episode_end(&state, settings, terminal, steps.len(), error)?;
    let metrics = RunMetrics {
        scene_seed: scene.rng_seed,
        method: planner.method.name().into(),
        occ_miou: end.occ_miou,
        sem_miou: end.sem_miou,
        mad: end.mad,
        num_push: end.num_push,
        collided: end.collided,
        fell: end.fell,
        steps: end.steps,
        terminal: terminal.name().into(),
        view_times: timings.iter().map(|t| t.view_seconds).collect(),
        push_times: timings.iter().filter_map(|t| t.push_seconds).collect(),
    };
    Ok(EpisodeRun {
        log: EpisodeLog { header, steps, end },
        belief: state.belief,
        scene: state.scene,
        metrics,
        timings,
    })
}

pub(crate) fn episode_end(
    state: &SimState,
    settings: &EpisodeSettings,
    terminal: Terminal,
    steps: usize,
    error: Option<String>,
) -> Result<EpisodeEnd> {
    Ok(EpisodeEnd {
        terminal,
        steps,
        occ_miou: occupancy_miou(&state.belief, &state.gt, settings.planner.theta_occ)?,
        sem_miou: semantic_miou(&state.belief, &state.gt)?,
        mad: state.mad,
        num_push: state.num_push,
        collided: state.collided,
        fell: state.fell,
        error,
    })
}
