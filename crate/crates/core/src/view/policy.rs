//! Seam for plugging an external view policy into the planner.

use super::nbv::{greedy_nbv, NbvConfig};
use super::observation::EnrichedObservation;
use super::pose::ActionBoxes;
use super::vig::VigEvaluator;
use crate::belief::BeliefState;
use crate::error::Result;
use crate::rng::{derive, Stream};

pub struct PolicyInput<'a> {
    pub observation: &'a EnrichedObservation,
    /// Available to planners that search the belief directly; a learned
    /// agent would only read `observation`.
    pub belief: &'a BeliefState,
    pub step: usize,
}

/// Proposes a normalized 6D view action.
pub trait ViewPolicy {
    fn propose(&mut self, input: &PolicyInput) -> Result<[f64; 6]>;
}

/// Wraps a policy, clamping out-of-range components and counting them.
pub struct PolicySeam<P> {
    pub policy: P,
    pub clamped: usize,
}

impl<P: ViewPolicy> PolicySeam<P> {
    pub fn new(policy: P) -> Self {
        PolicySeam { policy, clamped: 0 }
    }

    pub fn evaluate(&mut self, input: &PolicyInput) -> Result<[f64; 6]> {
        let mut a = self.policy.propose(input)?;
        for x in &mut a {
            if x.is_nan() {
                *x = 0.0;
                self.clamped += 1;
            } else if x.abs() > 1.0 {
                *x = x.clamp(-1.0, 1.0);
                self.clamped += 1;
            }
        }
        Ok(a)
    }
}

/// Always proposes the same action.
pub struct ConstantPolicy(pub [f64; 6]);

impl ViewPolicy for ConstantPolicy {
    fn propose(&mut self, _: &PolicyInput) -> Result<[f64; 6]> {
        Ok(self.0)
    }
}

/// Greedy NBV behind the policy interface. Candidate streams are keyed on
/// `(seed, step)`, exactly as the planner keys its own greedy search.
pub struct GreedyPolicy {
    pub boxes: ActionBoxes,
    pub cfg: NbvConfig,
    pub evaluator: VigEvaluator,
    pub seed: u64,
}

impl ViewPolicy for GreedyPolicy {
    fn propose(&mut self, input: &PolicyInput) -> Result<[f64; 6]> {
        let mut rng = derive(self.seed, input.step as u64, Stream::ViewCandidates);
        let best = greedy_nbv(
            input.belief,
            &self.boxes,
            &self.cfg,
            &mut self.evaluator,
            &mut rng,
        )?;
        self.boxes.normalize(&best.pose)
    }
}

/// Plays back a recorded action sequence; falls back to the box center.
pub struct ReplayPolicy {
    pub actions: Vec<[f64; 6]>,
    next: usize,
}

impl ReplayPolicy {
    pub fn new(actions: Vec<[f64; 6]>) -> Self {
        ReplayPolicy { actions, next: 0 }
    }
}

impl ViewPolicy for ReplayPolicy {
    fn propose(&mut self, _: &PolicyInput) -> Result<[f64; 6]> {
        let a = self.actions.get(self.next).copied().unwrap_or([0.0; 6]);
        self.next += 1;
        Ok(a)
    }
}

impl<P: ViewPolicy + ?Sized> ViewPolicy for Box<P> {
    fn propose(&mut self, input: &PolicyInput) -> Result<[f64; 6]> {
        (**self).propose(input)
    }
}
