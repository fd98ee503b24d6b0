use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;
use tokio::task::JoinHandle;
use tokio::time::MissedTickBehavior;
use uuid::Uuid;

use rendezvous_core::dataset::{GameplayLog, GameplayRecorder};
use rendezvous_core::orbital::Vec3;
use rendezvous_core::scenario::{
    Action, Episode, EpisodeConfig, EpisodeSummary, ScoreWeights, TerminationReason,
};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Created,
    Running,
    Done,
}

/// Body of `POST /sessions`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    #[serde(flatten)]
    pub config: EpisodeConfig,
    /// Wall-clock seconds per simulated second; below 1 runs faster than real time.
    #[serde(default = "one")]
    pub time_scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub distance: f64,
    pub speed: f64,
    pub fuel: f64,
    pub time: f64,
    pub total: f64,
}

impl ScoreBreakdown {
    fn new(summary: &EpisodeSummary, w: &ScoreWeights) -> Self {
        let distance = w.distance.eval(summary.closest_distance);
        let speed = w.velocity.eval(summary.speed_at_closest);
        let fuel = w.fuel.eval(summary.fuel_used);
        let time = w.time.eval(summary.elapsed);
        Self { distance, speed, fuel, time, total: distance + speed + fuel + time }
    }
}

/// Messages pushed on `/sessions/{id}/stream`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamMessage {
    State {
        tick: u64,
        time_elapsed: f64,
        vehicle_mass: f64,
        vehicle_propellant: f64,
        pursuer_pos: Vec3,
        pursuer_vel: Vec3,
        evader_pos: Vec3,
        evader_vel: Vec3,
        prograde: Option<Vec3>,
        range: f64,
        range_rate: f64,
        fuel_used: f64,
        closest_distance: f64,
        /// Action applied during the tick that led here.
        last_action: Option<Action>,
        score: ScoreBreakdown,
    },
    Done {
        termination: Option<TerminationReason>,
        result: EpisodeSummary,
    },
}

struct Inner {
    status: Status,
    episode: Episode,
    pending: Option<Action>,
    recorder: Option<GameplayRecorder>,
    log: Option<GameplayLog>,
    backlog: Vec<Arc<str>>,
    task: Option<JoinHandle<()>>,
}

/// One human-piloted episode.
pub struct Session {
    pub id: Uuid,
    pub time_scale: f64,
    log_dir: Option<PathBuf>,
    inner: Mutex<Inner>,
    events: broadcast::Sender<Arc<str>>,
}

fn state_message(episode: &Episode, last_action: Option<Action>) -> StreamMessage {
    let obs = episode.observation();
    let summary = episode.summary();
    StreamMessage::State {
        tick: episode.tick(),
        time_elapsed: obs.time_elapsed,
        vehicle_mass: obs.vehicle_mass,
        vehicle_propellant: obs.vehicle_propellant,
        pursuer_pos: obs.pursuer_pos,
        pursuer_vel: obs.pursuer_vel,
        evader_pos: obs.evader_pos,
        evader_vel: obs.evader_vel,
        prograde: obs.prograde,
        range: obs.range,
        range_rate: obs.range_rate,
        fuel_used: summary.fuel_used,
        closest_distance: summary.closest_distance,
        last_action,
        score: ScoreBreakdown::new(&summary, &episode.config().score_weights),
    }
}

impl Session {
    pub fn create(request: CreateSession, log_dir: Option<PathBuf>) -> Result<Arc<Self>, ServiceError> {
        if !(request.time_scale > 0.0 && request.time_scale.is_finite()) {
            return Err(ServiceError::Invalid(format!("time_scale must be positive, got {}", request.time_scale)));
        }
        let episode = Episode::reset(request.config.clone()).map_err(|e| ServiceError::Invalid(e.to_string()))?;
        let recorder = GameplayRecorder::new(&request.config, "human", serde_json::Value::Null);
        let initial: Arc<str> = serde_json::to_string(&state_message(&episode, None))
            .map_err(|e| ServiceError::Internal(e.to_string()))?
            .into();
        let (events, _) = broadcast::channel(1024);
        Ok(Arc::new(Self {
            id: Uuid::new_v4(),
            time_scale: request.time_scale,
            log_dir,
            inner: Mutex::new(Inner {
                status: Status::Created,
                episode,
                pending: None,
                recorder: Some(recorder),
                log: None,
                backlog: vec![initial],
                task: None,
            }),
            events,
        }))
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn status(&self) -> Status {
        self.lock().status
    }

    pub fn tick(&self) -> u64 {
        self.lock().episode.tick()
    }

    /// Begin wall-clock stepping. Fails unless the session is freshly created.
    pub fn start(self: &Arc<Self>) -> Result<(), ServiceError> {
        let mut inner = self.lock();
        if inner.status != Status::Created {
            return Err(ServiceError::Conflict(format!("session is {:?}", inner.status)));
        }
        inner.status = Status::Running;
        let period = inner.episode.config().decision_period * self.time_scale;
        let session = Arc::clone(self);
        inner.task = Some(tokio::spawn(async move {
            let mut timer = tokio::time::interval(Duration::from_secs_f64(period));
            timer.set_missed_tick_behavior(MissedTickBehavior::Delay);
            timer.tick().await;
            loop {
                timer.tick().await;
                if session.advance() {
                    break;
                }
            }
            session.write_log().await;
        }));
        Ok(())
    }

    /// Store `action` for the next tick, replacing any earlier submission.
    pub fn submit(&self, action: Action) -> Result<u64, ServiceError> {
        let mut inner = self.lock();
        match inner.status {
            Status::Running => {
                inner.pending = Some(action);
                Ok(inner.episode.tick())
            }
            other => Err(ServiceError::Conflict(format!("session is {other:?}"))),
        }
    }

    /// Apply the pending action for one tick; true once the episode is over.
    fn advance(&self) -> bool {
        let mut inner = self.lock();
        if inner.status != Status::Running {
            return true;
        }
        let action = inner.pending.take().unwrap_or(Action::NONE);
        let obs = inner.episode.observation().clone();
        if let Some(rec) = inner.recorder.as_mut() {
            rec.record(&obs, &action);
        }
        let stepped = inner.episode.step(&action);
        let mut messages = Vec::with_capacity(2);
        match stepped {
            Ok(_) => messages.push(state_message(&inner.episode, Some(action))),
            Err(e) => {
                if let Some(rec) = inner.recorder.take() {
                    inner.log = Some(rec.abort(e));
                }
            }
        }
        let finished = inner.episode.is_done() || inner.log.is_some();
        if finished {
            inner.status = Status::Done;
            let termination = inner.episode.termination();
            if let Some(rec) = inner.recorder.take() {
                inner.log = Some(rec.finish(termination));
            }
            messages.push(StreamMessage::Done { termination, result: inner.episode.summary() });
        }
        for m in messages {
            if let Ok(text) = serde_json::to_string(&m) {
                let text: Arc<str> = text.into();
                inner.backlog.push(Arc::clone(&text));
                let _ = self.events.send(text);
            }
        }
        finished
    }

    async fn write_log(&self) {
        let (Some(dir), Some(log)) = (self.log_dir.clone(), self.log()) else { return };
        let Ok(text) = serde_json::to_vec_pretty(&log) else { return };
        if tokio::fs::create_dir_all(&dir).await.is_ok() {
            let _ = tokio::fs::write(dir.join(format!("session_{}.json", self.id)), text).await;
        }
    }

    /// Everything sent so far plus a receiver for what follows, taken
    /// atomically so a subscriber sees no gaps or duplicates.
    pub fn subscribe(&self) -> (Vec<Arc<str>>, broadcast::Receiver<Arc<str>>) {
        let inner = self.lock();
        (inner.backlog.clone(), self.events.subscribe())
    }

    pub fn result(&self) -> Result<EpisodeSummary, ServiceError> {
        let inner = self.lock();
        match inner.status {
            Status::Done => Ok(inner.episode.summary()),
            other => Err(ServiceError::Conflict(format!("session is {other:?}"))),
        }
    }

    /// Recorded samples; partial while the session is running.
    pub fn log(&self) -> Option<GameplayLog> {
        let inner = self.lock();
        inner.log.clone().or_else(|| inner.recorder.as_ref().map(|r| r.log().clone()))
    }

    pub fn stop(&self) {
        let mut inner = self.lock();
        if let Some(task) = inner.task.take() {
            task.abort();
        }
    }
}
