//! Next-best-view side of the planner.

mod feasibility;
mod nbv;
mod observation;
mod policy;
mod pose;
mod reward;
mod vig;

pub use feasibility::feasibility;
pub use nbv::{greedy_nbv, random_view, uncertain_cells, NbvConfig, NbvResult};
pub use observation::{
    encode_observation, normalized_height_map, EnrichedObservation, HistoryEntry, ViewHistory,
};
pub use policy::{ConstantPolicy, GreedyPolicy, PolicyInput, PolicySeam, ReplayPolicy, ViewPolicy};
pub use pose::{Aabb3, ActionBoxes, ViewPose};
pub use reward::{
    repeat_penalty, repeat_penalty_term, step_reward, uncertainty_reward, uncertainty_reward_from,
    view_distances, RewardConfig, Transition,
};
pub use vig::{expected_vig, InfoMeasure, VigEvaluator};
