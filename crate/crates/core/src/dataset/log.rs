use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::scenario::{
    run_episode, Action, Episode, EpisodeConfig, EpisodeResult, Observation, Pilot, ReplayPilot,
    ScenarioError, TerminationReason,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid gameplay log: {0}")]
    InvalidLog(String),
    #[error("invalid export options: {0}")]
    InvalidOptions(String),
    #[error("record {index} does not match its source: {reason}")]
    Provenance { index: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMeta {
    pub seed: u64,
    pub scenario: String,
    /// `navball`, `naive`, `llm`, `human`, ...
    pub agent_kind: String,
    /// Agent parameters as recorded by the caller.
    #[serde(default)]
    pub params: Value,
    /// s
    pub decision_period: f64,
    /// False when the episode stopped on an error.
    pub complete: bool,
    #[serde(default)]
    pub termination: Option<TerminationReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Observation and chosen action at one decision tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub tick: u64,
    pub observation: Observation,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameplayLog {
    pub meta: LogMeta,
    pub samples: Vec<Sample>,
}

impl GameplayLog {
    /// Ticks start at 0, increase by one, and observation times sit exactly on
    /// the decision grid.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let period = self.meta.decision_period;
        if !(period > 0.0) {
            return Err(DatasetError::InvalidLog(format!("decision period {period}")));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.tick != i as u64 {
                return Err(DatasetError::InvalidLog(format!("sample {i} has tick {}", s.tick)));
            }
            let expected = i as f64 * period;
            if (s.observation.time_elapsed - expected).abs() > 1e-9 {
                return Err(DatasetError::InvalidLog(format!(
                    "sample {i} at t={} but expected {expected}",
                    s.observation.time_elapsed
                )));
            }
        }
        Ok(())
    }

    pub fn actions(&self) -> Vec<Action> {
        self.samples.iter().map(|s| s.action).collect()
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), DatasetError> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self, DatasetError> {
        let log: Self = serde_json::from_reader(input)?;
        log.validate()?;
        Ok(log)
    }
}

/// Accumulates samples as an episode is played, by any kind of pilot.
#[derive(Debug, Clone)]
pub struct GameplayRecorder {
    log: GameplayLog,
}

impl GameplayRecorder {
    pub fn new(config: &EpisodeConfig, agent_kind: &str, params: Value) -> Self {
        Self {
            log: GameplayLog {
                meta: LogMeta {
                    seed: config.seed,
                    scenario: config.scenario_id.clone(),
                    agent_kind: agent_kind.to_string(),
                    params,
                    decision_period: config.decision_period,
                    complete: false,
                    termination: None,
                    error: None,
                },
                samples: Vec::new(),
            },
        }
    }

    pub fn record(&mut self, observation: &Observation, action: &Action) {
        let tick = self.log.samples.len() as u64;
        self.log.samples.push(Sample { tick, observation: observation.clone(), action: *action });
    }

    pub fn len(&self) -> usize {
        self.log.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.samples.is_empty()
    }

    pub fn log(&self) -> &GameplayLog {
        &self.log
    }

    pub fn finish(mut self, termination: Option<TerminationReason>) -> GameplayLog {
        self.log.meta.complete = true;
        self.log.meta.termination = termination;
        self.log
    }

    pub fn abort(mut self, error: impl ToString) -> GameplayLog {
        self.log.meta.complete = false;
        self.log.meta.error = Some(error.to_string());
        self.log
    }
}

/// Play one episode with `pilot`, logging every decision. An error mid-run
/// yields a partial log flagged incomplete; a bad config is an error.
pub fn record_episode<P: Pilot + ?Sized>(
    config: &EpisodeConfig,
    pilot: &mut P,
    params: Value,
) -> Result<GameplayLog, DatasetError> {
    let mut episode = Episode::reset(config.clone())?;
    let mut recorder = GameplayRecorder::new(config, pilot.kind(), params);
    while !episode.is_done() {
        let obs = episode.observation().clone();
        let action = pilot.act(&obs);
        recorder.record(&obs, &action);
        if let Err(e) = episode.step(&action) {
            return Ok(recorder.abort(e));
        }
    }
    Ok(recorder.finish(episode.termination()))
}

/// Re-run the logged actions from the logged seed.
pub fn replay(log: &GameplayLog, config: &EpisodeConfig) -> Result<EpisodeResult, DatasetError> {
    let mut cfg = config.clone();
    cfg.seed = log.meta.seed;
    let mut pilot = ReplayPilot::new(log.actions());
    Ok(run_episode(cfg, &mut pilot)?)
}
