//! Session server for flying rendezvous episodes by hand.
//!
//! Each session owns one episode that advances on a wall-clock timer; the
//! latest submitted action is applied at every tick and state is pushed to
//! WebSocket subscribers. Finished sessions leave a gameplay log in the same
//! schema the bot recorder writes.

mod session;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;
use tower_http::services::ServeDir;
use uuid::Uuid;

use rendezvous_core::scenario::{Action, DownThrottle, ForwardThrottle, RightThrottle};

pub use session::{CreateSession, ScoreBreakdown, Session, Status, StreamMessage};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    Invalid(String),
    #[error("no session {0}")]
    NotFound(Uuid),
    #[error("{0}")]
    Conflict(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({"error": self.to_string()}))).into_response()
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<Session>>>>,
    log_dir: Option<PathBuf>,
}

impl AppState {
    /// Finished sessions write `session_{id}.json` into `log_dir` when set.
    pub fn new(log_dir: Option<PathBuf>) -> Self {
        Self { sessions: Arc::default(), log_dir }
    }

    pub fn session(&self, id: Uuid) -> Result<Arc<Session>, ServiceError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&id)
            .cloned()
            .ok_or(ServiceError::NotFound(id))
    }
}

/// Body of `POST /sessions/{id}/action`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ActionBody {
    pub ft: ForwardThrottle,
    pub rt: RightThrottle,
    pub dt: DownThrottle,
}

async fn create(
    State(state): State<AppState>,
    Json(body): Json<CreateSession>,
) -> Result<impl IntoResponse, ServiceError> {
    let session = Session::create(body, state.log_dir.clone())?;
    let id = session.id;
    state.sessions.write().unwrap_or_else(|e| e.into_inner()).insert(id, session);
    Ok((StatusCode::CREATED, Json(json!({"id": id}))))
}

async fn describe(State(state): State<AppState>, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    let s = state.session(id)?;
    Ok(Json(json!({"id": id, "status": s.status(), "tick": s.tick(), "time_scale": s.time_scale})))
}

async fn remove(State(state): State<AppState>, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    let s = state
        .sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .remove(&id)
        .ok_or(ServiceError::NotFound(id))?;
    s.stop();
    Ok(StatusCode::NO_CONTENT)
}

async fn start(State(state): State<AppState>, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    state.session(id)?.start()?;
    Ok(Json(json!({"status": Status::Running})))
}

async fn submit(
    State(state): State<AppState>,
    Path(id): Path<Uuid>,
    Json(body): Json<ActionBody>,
) -> Result<impl IntoResponse, ServiceError> {
    let tick = state.session(id)?.submit(Action::new(body.ft, body.rt, body.dt))?;
    Ok((StatusCode::ACCEPTED, Json(json!({"tick": tick}))))
}

async fn result(State(state): State<AppState>, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    Ok(Json(state.session(id)?.result()?))
}

async fn log(State(state): State<AppState>, Path(id): Path<Uuid>) -> Result<impl IntoResponse, ServiceError> {
    let log = state.session(id)?.log().ok_or_else(|| ServiceError::Internal("log unavailable".into()))?;
    Ok(Json(log))
}

async fn stream(
    State(state): State<AppState>,
    Path(id): Path<Uuid>,
    ws: WebSocketUpgrade,
) -> Result<impl IntoResponse, ServiceError> {
    let session = state.session(id)?;
    Ok(ws.on_upgrade(move |socket| push_states(socket, session)))
}

async fn push_states(mut socket: WebSocket, session: Arc<Session>) {
    let (backlog, mut rx) = session.subscribe();
    for text in backlog {
        let done = is_done(&text);
        if socket.send(Message::Text(text.as_ref().into())).await.is_err() || done {
            let _ = socket.send(Message::Close(None)).await;
            return;
        }
    }
    loop {
        match rx.recv().await {
            Ok(text) => {
                let done = is_done(&text);
                if socket.send(Message::Text(text.as_ref().into())).await.is_err() {
                    return;
                }
                if done {
                    let _ = socket.send(Message::Close(None)).await;
                    return;
                }
            }
            // A client this far behind has lost ordering; drop it.
            Err(RecvError::Lagged(_)) | Err(RecvError::Closed) => return,
        }
    }
}

fn is_done(text: &str) -> bool {
    text.starts_with(r#"{"type":"done""#)
}

/// All HTTP and WebSocket routes; `static_dir` is served at `/` when given.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(describe).delete(remove))
        .route("/sessions/{id}/start", post(start))
        .route("/sessions/{id}/action", post(submit))
        .route("/sessions/{id}/result", get(result))
        .route("/sessions/{id}/log", get(log))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Bind `addr` and serve until the process ends.
pub async fn serve(
    addr: std::net::SocketAddr,
    state: AppState,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state, static_dir)).await
}
