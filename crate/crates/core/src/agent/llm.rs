use std::io::{self, Write};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::client::{CompletionClient, CompletionError, CompletionRequest};
use super::message::{perform_action_schema, ChatMessage};
use super::parse::{parse_action, ParseFailure};
use super::prompt::{build_prompts, call_text, PromptMode, PromptTemplate};
use super::window::{Exchange, SlidingWindow};
use crate::scenario::{Action, CallStats, Observation, Pilot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub endpoint: String,
    pub model: String,
    /// s
    pub timeout: f64,
    pub temperature: f64,
    pub window: usize,
    pub mode: PromptMode,
    /// Returned whenever a call yields no action.
    pub default_action: Action,
    /// Pause after a failed call (s).
    pub retry_wait: f64,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://localhost:8000/v1".into(),
            model: "gpt-3.5-turbo".into(),
            timeout: 30.0,
            temperature: 0.0,
            window: 0,
            mode: PromptMode::Augmented,
            default_action: Action::NONE,
            retry_wait: 1.0,
            api_key: None,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(format!("timeout must be positive, got {}", self.timeout));
        }
        if !(self.retry_wait >= 0.0 && self.retry_wait.is_finite()) {
            return Err(format!("retry_wait must be non-negative, got {}", self.retry_wait));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(format!("temperature must be non-negative, got {}", self.temperature));
        }
        Ok(())
    }
}

/// Source of the post-failure pause.
pub trait Clock {
    fn sleep(&mut self, duration: Duration);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn sleep(&mut self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Records requested pauses without sleeping.
#[derive(Debug, Clone, Default)]
pub struct RecordingClock {
    pub sleeps: Vec<Duration>,
}

impl Clock for RecordingClock {
    fn sleep(&mut self, duration: Duration) {
        self.sleeps.push(duration);
    }
}

/// Why an agent call fell back to the default action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum CallFailure {
    Completion { kind: String, message: String },
    Parse { failure: ParseFailure },
}

impl CallFailure {
    pub fn kind(&self) -> &str {
        match self {
            CallFailure::Completion { kind, .. } => kind,
            CallFailure::Parse { failure } => failure.kind(),
        }
    }
}

impl From<CompletionError> for CallFailure {
    fn from(e: CompletionError) -> Self {
        CallFailure::Completion { kind: e.kind().to_string(), message: e.to_string() }
    }
}

/// One line of the interaction log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub tick: u64,
    pub latency_ms: f64,
    /// `"ok"` or the failure kind.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<CallFailure>,
    pub prompts: Vec<ChatMessage>,
    pub reply: Option<ChatMessage>,
    pub action: Action,
}

/// Chat-model pilot: prompt, call, parse, and fall back on failure.
pub struct LlmAgent<C> {
    config: AgentConfig,
    template: PromptTemplate,
    window: SlidingWindow,
    client: C,
    clock: Box<dyn Clock + Send>,
    schema: Value,
    stats: CallStats,
    log: Vec<InteractionRecord>,
    tick: u64,
}

impl<C: CompletionClient> LlmAgent<C> {
    pub fn new(config: AgentConfig, client: C) -> Result<Self, String> {
        config.validate()?;
        Ok(Self {
            template: PromptTemplate::for_mode(config.mode),
            window: SlidingWindow::new(config.window),
            config,
            client,
            clock: Box::new(SystemClock),
            schema: perform_action_schema(),
            stats: CallStats::default(),
            log: Vec::new(),
            tick: 0,
        })
    }

    pub fn with_clock(mut self, clock: impl Clock + Send + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn with_template(mut self, template: PromptTemplate) -> Self {
        self.template = template;
        self
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn window(&self) -> &SlidingWindow {
        &self.window
    }

    pub fn client(&self) -> &C {
        &self.client
    }

    pub fn stats(&self) -> &CallStats {
        &self.stats
    }

    pub fn interaction_log(&self) -> &[InteractionRecord] {
        &self.log
    }

    /// Write the interaction log as newline-delimited JSON.
    pub fn write_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        for record in &self.log {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Decide one tick. Never fails: errors yield the default action.
    pub fn get_action(&mut self, obs: &Observation) -> Action {
        let prompts = build_prompts(obs, &self.window, &self.template);
        let request = CompletionRequest { messages: &prompts, schema: &self.schema, observation: obs };

        let started = Instant::now();
        let reply = self.client.complete(&request);
        let latency_ms = started.elapsed().as_secs_f64() * 1e3;
        self.stats.attempts += 1;
        self.stats.latencies_ms.push(latency_ms);

        let (reply, parsed) = match reply {
            Ok(msg) => {
                let parsed = parse_action(&msg).map_err(|failure| CallFailure::Parse { failure });
                (Some(msg), parsed)
            }
            Err(e) => (None, Err(CallFailure::from(e))),
        };

        let (action, outcome, failure) = match parsed {
            Ok(action) => {
                self.window.push(Exchange {
                    user: self.template.history_prompt(obs),
                    assistant: call_text(&action),
                });
                (action, "ok".to_string(), None)
            }
            Err(failure) => {
                self.stats.failures += 1;
                self.stats.defaults_emitted += 1;
                (self.config.default_action, failure.kind().to_string(), Some(failure))
            }
        };

        self.log.push(InteractionRecord {
            tick: self.tick,
            latency_ms,
            outcome,
            failure,
            prompts,
            reply,
            action,
        });
        self.tick += 1;

        if self.log.last().is_some_and(|r| r.failure.is_some()) && self.config.retry_wait > 0.0 {
            self.clock.sleep(Duration::from_secs_f64(self.config.retry_wait));
        }
        action
    }
}

impl<C: CompletionClient> Pilot for LlmAgent<C> {
    fn kind(&self) -> &str {
        "llm"
    }

    fn act(&mut self, obs: &Observation) -> Action {
        self.get_action(obs)
    }

    fn call_stats(&self) -> Option<&CallStats> {
        Some(&self.stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::client::ScriptedClient;
    use crate::scenario::{DownThrottle, Episode, EpisodeConfig, ForwardThrottle, RightThrottle};

    fn obs() -> Observation {
        Episode::reset(EpisodeConfig::with_seed(3)).unwrap().observation().clone()
    }

    #[test]
    fn scripted_call_is_parsed_and_windowed() {
        let client = ScriptedClient::from_texts([
            r#"Therefore we should call perform_action({"ft": "forward", "rt": "left", "dt": "up"})."#,
        ]);
        let cfg = AgentConfig { window: 3, ..AgentConfig::default() };
        let mut agent = LlmAgent::new(cfg, client).unwrap().with_clock(RecordingClock::default());
        let a = agent.get_action(&obs());
        assert_eq!(a, Action::new(ForwardThrottle::Forward, RightThrottle::Left, DownThrottle::Up));
        assert_eq!(agent.window().len(), 1);
        assert_eq!(agent.stats().failures, 0);
        assert_eq!(agent.interaction_log()[0].outcome, "ok");
    }

    #[test]
    fn malformed_reply_falls_back_after_wait() {
        let client = ScriptedClient::from_texts(["I cannot determine an action."]);
        let mut agent = LlmAgent::new(AgentConfig::default(), client).unwrap();
        agent.clock = Box::new(RecordingClock::default());
        let a = agent.get_action(&obs());
        assert_eq!(a, Action::NONE);
        assert_eq!(agent.stats().failures, 1);
        assert_eq!(agent.stats().defaults_emitted, 1);
        assert_eq!(agent.window().len(), 0);
        assert_eq!(agent.interaction_log()[0].outcome, "no_action");
        // Exhausted script: completion-level failure.
        agent.get_action(&obs());
        assert_eq!(agent.interaction_log()[1].outcome, "protocol");
        assert_eq!(agent.stats().latencies_ms.len(), 2);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = AgentConfig { timeout: 0.0, ..AgentConfig::default() };
        assert!(LlmAgent::new(cfg, ScriptedClient::default()).is_err());
    }

    #[test]
    fn log_is_ndjson() {
        let mut agent = LlmAgent::new(AgentConfig::default(), ScriptedClient::from_texts(["forward"]))
            .unwrap()
            .with_clock(RecordingClock::default());
        agent.get_action(&obs());
        let mut buf = Vec::new();
        agent.write_log(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        let v: Value = serde_json::from_str(text.trim()).unwrap();
        for key in ["tick", "latency_ms", "outcome", "prompts", "reply", "action"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
