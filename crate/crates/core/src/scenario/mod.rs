//! The E3 pursuer–evader episode: reset from generated orbits, fixed-cadence
//! stepping with substep closest-approach tracking, the evader's escape burn
//! and scoring.

mod action;
mod config;
mod episode;
mod evader;
mod observation;
mod pilot;
mod score;

pub use action::{action_to_throttle, Action, DownThrottle, ForwardThrottle, RightThrottle};
pub use config::{
    default_evader_orbit, EpisodeConfig, PursuerInit, ScoreTerm, ScoreWeights, VesselParams,
    SCENARIO_ID,
};
pub use episode::{
    run_episode, Episode, EpisodeResult, EpisodeSummary, Kinematics, StepOutcome,
    TerminationReason, TrajectoryRecord,
};
pub use evader::evader_policy_e3;
pub use observation::{pursuer_frame, pursuer_prograde, range_and_rate, Observation};
pub use pilot::{CallStats, CoastPilot, NaivePilot, Pilot, ReplayPilot};
pub use score::compute_score;

use crate::orbital::OrbitError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid episode config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("episode already finished")]
    EpisodeDone,
    #[error("score component {0} must be non-negative, got {1}")]
    NegativeScoreComponent(&'static str, f64),
}
