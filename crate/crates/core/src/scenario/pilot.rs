use serde::{Deserialize, Serialize};

use super::{Action, Observation};

/// Anything that picks a throttle command from an observation.
pub trait Pilot {
    /// Short name used in logs and reports.
    fn kind(&self) -> &str;

    fn act(&mut self, obs: &Observation) -> Action;

    /// Per-call accounting for pilots backed by a model endpoint.
    fn call_stats(&self) -> Option<&CallStats> {
        None
    }
}

impl<P: Pilot + ?Sized> Pilot for Box<P> {
    fn kind(&self) -> &str {
        (**self).kind()
    }
    fn act(&mut self, obs: &Observation) -> Action {
        (**self).act(obs)
    }
    fn call_stats(&self) -> Option<&CallStats> {
        (**self).call_stats()
    }
}

/// Attempts, failures and wall-clock latency of model calls.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CallStats {
    pub attempts: u64,
    pub failures: u64,
    /// Times the default action was returned because a call failed.
    pub defaults_emitted: u64,
    /// One entry per attempt, in call order.
    pub latencies_ms: Vec<f64>,
}

impl CallStats {
    pub fn successes(&self) -> u64 {
        self.attempts - self.failures
    }
}

/// Burns straight at the target every tick.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaivePilot;

impl Pilot for NaivePilot {
    fn kind(&self) -> &str {
        "naive"
    }

    fn act(&mut self, _obs: &Observation) -> Action {
        Action::forward()
    }
}

/// Coasts every tick.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoastPilot;

impl Pilot for CoastPilot {
    fn kind(&self) -> &str {
        "coast"
    }

    fn act(&mut self, _obs: &Observation) -> Action {
        Action::NONE
    }
}

/// Plays back a fixed action list, then coasts.
#[derive(Debug, Clone)]
pub struct ReplayPilot {
    actions: Vec<Action>,
    next: usize,
}

impl ReplayPilot {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions, next: 0 }
    }
}

impl Pilot for ReplayPilot {
    fn kind(&self) -> &str {
        "replay"
    }

    fn act(&mut self, _obs: &Observation) -> Action {
        let a = self.actions.get(self.next).copied().unwrap_or(Action::NONE);
        self.next += 1;
        a
    }
}
