//! Evaluation campaigns, report tables and imitation metrics.

mod campaign;
mod export;
mod metrics;

pub use campaign::{run_campaign, AgentSpec, Aggregates, Campaign, CampaignReport, EpisodeRow};
pub use export::{export_trajectories, read_trajectory, render_range_plot};
pub use metrics::{action_accuracy, cross_entropy, latency_stats, LatencyStats, PROBABILITY_FLOOR};

use thiserror::Error;

use crate::scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("agent construction failed: {0}")]
    Agent(String),
    #[error("sequence lengths differ: {predicted} predicted vs {truth} truth")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("nothing to evaluate")]
    Empty,
}
