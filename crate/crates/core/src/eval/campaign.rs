use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{latency_stats, LatencyStats};
use super::EvalError;
use crate::agent::{
    AgentConfig, FixedClient, HttpClient, HttpSettings, LlmAgent, OracleClient, RecordingClock,
};
use crate::navball::{NavballParams, NavballPilot};
use crate::scenario::{
    run_episode, EpisodeConfig, EpisodeResult, EpisodeSummary, NaivePilot, Pilot,
};

/// Which pilot flies the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    Navball { params: NavballParams },
    Naive,
    /// Chat agent whose backend answers with the navball bot's choice.
    Oracle { config: AgentConfig, params: NavballParams },
    /// Chat agent whose backend always sends `reply`; failure waits are
    /// recorded, not slept.
    Mock { config: AgentConfig, reply: String },
    /// Chat agent against a remote endpoint.
    Llm { config: AgentConfig },
}

impl AgentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AgentSpec::Navball { .. } => "navball",
            AgentSpec::Naive => "naive",
            AgentSpec::Oracle { .. } => "oracle",
            AgentSpec::Mock { .. } => "mock",
            AgentSpec::Llm { .. } => "llm",
        }
    }

    /// A fresh pilot; each episode gets its own so windows and logs are not shared.
    pub fn build(&self) -> Result<Box<dyn Pilot>, EvalError> {
        Ok(match self {
            AgentSpec::Navball { params } => {
                Box::new(NavballPilot::new(*params).map_err(|e| EvalError::Agent(e.to_string()))?)
            }
            AgentSpec::Naive => Box::new(NaivePilot),
            AgentSpec::Oracle { config, params } => Box::new(
                LlmAgent::new(config.clone(), OracleClient { params: *params }).map_err(EvalError::Agent)?,
            ),
            AgentSpec::Mock { config, reply } => Box::new(
                LlmAgent::new(config.clone(), FixedClient::text(reply.clone()))
                    .map_err(EvalError::Agent)?
                    .with_clock(RecordingClock::default()),
            ),
            AgentSpec::Llm { config } => {
                let client = HttpClient::new(HttpSettings {
                    endpoint: config.endpoint.clone(),
                    model: config.model.clone(),
                    temperature: config.temperature,
                    timeout: std::time::Duration::from_secs_f64(config.timeout),
                    api_key: config.api_key.clone(),
                })
                .map_err(|e| EvalError::Agent(e.to_string()))?;
                Box::new(LlmAgent::new(config.clone(), client).map_err(EvalError::Agent)?)
            }
        })
    }

    /// Remote agents run one episode at a time to keep request pacing sane.
    fn parallel(&self) -> bool {
        !matches!(self, AgentSpec::Llm { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    #[serde(flatten)]
    pub summary: EpisodeSummary,
    pub attempts: u64,
    pub failures: u64,
    pub latencies_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub episodes: usize,
    pub best_distance: f64,
    pub avg_distance: f64,
    pub best_speed: f64,
    pub avg_speed: f64,
    pub avg_fuel: f64,
    pub best_score: f64,
    pub avg_score: f64,
    pub attempts: u64,
    pub failures: u64,
    /// failures / attempts over all model calls; 0 when there were none.
    pub failure_rate: f64,
    pub latency: Option<LatencyStats>,
}

impl Aggregates {
    pub fn from_rows(rows: &[EpisodeRow]) -> Result<Self, EvalError> {
        if rows.is_empty() {
            return Err(EvalError::Empty);
        }
        let n = rows.len() as f64;
        let min = |f: fn(&EpisodeRow) -> f64| rows.iter().map(f).fold(f64::INFINITY, f64::min);
        let avg = |f: fn(&EpisodeRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        let attempts: u64 = rows.iter().map(|r| r.attempts).sum();
        let failures: u64 = rows.iter().map(|r| r.failures).sum();
        let latencies: Vec<f64> = rows.iter().flat_map(|r| r.latencies_ms.iter().copied()).collect();
        Ok(Self {
            episodes: rows.len(),
            best_distance: min(|r| r.summary.closest_distance),
            avg_distance: avg(|r| r.summary.closest_distance),
            best_speed: min(|r| r.summary.speed_at_closest),
            avg_speed: avg(|r| r.summary.speed_at_closest),
            avg_fuel: avg(|r| r.summary.fuel_used),
            best_score: min(|r| r.summary.score),
            avg_score: avg(|r| r.summary.score),
            attempts,
            failures,
            failure_rate: if attempts == 0 { 0.0 } else { failures as f64 / attempts as f64 },
            latency: latency_stats(&latencies),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub agent: String,
    pub episodes: Vec<EpisodeRow>,
    pub aggregates: Aggregates,
}

impl CampaignReport {
    /// Aligned plain-text table: one row per episode, then the aggregates.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>8}  {:>12}  {:>10}  {:>9}  {:>10}  {:>8}  {:>8}  {:<20}",
            "seed", "closest_m", "speed_m_s", "fuel_kg", "score", "calls", "fails", "termination"
        );
        for r in &self.episodes {
            let s = &r.summary;
            let term = s.termination.map(|t| format!("{t:?}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:>8}  {:>12.3}  {:>10.3}  {:>9.2}  {:>10.3}  {:>8}  {:>8}  {:<20}",
                s.seed, s.closest_distance, s.speed_at_closest, s.fuel_used, s.score, r.attempts, r.failures, term
            );
        }
        let a = &self.aggregates;
        let _ = writeln!(out);
        let _ = writeln!(out, "agent          {}", self.agent);
        let _ = writeln!(out, "episodes       {}", a.episodes);
        let _ = writeln!(out, "distance (m)   best {:.3}  avg {:.3}", a.best_distance, a.avg_distance);
        let _ = writeln!(out, "speed (m/s)    best {:.3}  avg {:.3}", a.best_speed, a.avg_speed);
        let _ = writeln!(out, "fuel (kg)      avg {:.2}", a.avg_fuel);
        let _ = writeln!(out, "score          best {:.3}  avg {:.3}", a.best_score, a.avg_score);
        let _ = writeln!(out, "failure rate   {:.4} ({}/{})", a.failure_rate, a.failures, a.attempts);
        if let Some(l) = &a.latency {
            let _ = writeln!(
                out,
                "latency (ms)   best {:.2}  avg {:.2}  stddev {:.2}  n={}",
                l.best_ms, l.avg_ms, l.stddev_ms, l.count
            );
        }
        out
    }
}

/// Report plus the full per-episode results (with trajectories).
#[derive(Debug, Clone)]
pub struct Campaign {
    pub report: CampaignReport,
    pub results: Vec<EpisodeResult>,
}

fn run_one(spec: &AgentSpec, config: &EpisodeConfig, seed: u64) -> Result<(EpisodeResult, EpisodeRow), EvalError> {
    let mut pilot = spec.build()?;
    let result = run_episode(EpisodeConfig { seed, ..config.clone() }, &mut pilot)?;
    let stats = pilot.call_stats().cloned().unwrap_or_default();
    let row = EpisodeRow {
        summary: result.summary.clone(),
        attempts: stats.attempts,
        failures: stats.failures,
        latencies_ms: stats.latencies_ms,
    };
    Ok((result, row))
}

/// One episode per seed, in seed order. Any error aborts the whole campaign.
pub fn run_campaign(spec: &AgentSpec, config: &EpisodeConfig, seeds: &[u64]) -> Result<Campaign, EvalError> {
    if seeds.is_empty() {
        return Err(EvalError::Empty);
    }
    config.validate()?;
    spec.build()?;

    let outcomes: Vec<_> = if spec.parallel() {
        seeds.par_iter().map(|&s| run_one(spec, config, s)).collect::<Result<_, _>>()?
    } else {
        seeds.iter().map(|&s| run_one(spec, config, s)).collect::<Result<_, _>>()?
    };
    let (results, rows): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let aggregates = Aggregates::from_rows(&rows)?;
    Ok(Campaign {
        report: CampaignReport { agent: spec.name().to_string(), episodes: rows, aggregates },
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> EpisodeConfig {
        EpisodeConfig { max_duration: 20.0, ..EpisodeConfig::default() }
    }

    #[test]
    fn navball_never_fails() {
        let c = run_campaign(&AgentSpec::Navball { params: NavballParams::default() }, &short(), &[0, 1, 2]).unwrap();
        let a = &c.report.aggregates;
        assert_eq!(a.failure_rate, 0.0);
        assert!(a.best_distance <= a.avg_distance);
        assert_eq!(c.report.episodes.iter().map(|r| r.summary.seed).collect::<Vec<_>>(), [0, 1, 2]);
        assert!(c.report.to_table().contains("failure rate   0.0000"));
    }

    #[test]
    fn malformed_mock_always_fails() {
        let spec = AgentSpec::Mock { config: AgentConfig::default(), reply: "no idea".into() };
        let c = run_campaign(&spec, &short(), &[4, 5]).unwrap();
        assert_eq!(c.report.aggregates.failure_rate, 1.0);
        assert_eq!(c.report.aggregates.attempts, 80);
        assert!(c.results.iter().all(|r| r.trajectory.iter().all(|t| t.action.is_none())));
    }

    #[test]
    fn empty_seed_list_and_bad_agent_abort() {
        let spec = AgentSpec::Naive;
        assert!(matches!(run_campaign(&spec, &short(), &[]), Err(EvalError::Empty)));
        let bad = AgentSpec::Oracle {
            config: AgentConfig { timeout: -1.0, ..AgentConfig::default() },
            params: NavballParams::default(),
        };
        assert!(matches!(run_campaign(&bad, &short(), &[1]), Err(EvalError::Agent(_))));
    }
}
