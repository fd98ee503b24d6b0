use std::time::{Duration, Instant};

use futures_util::StreamExt;
use reqwest::StatusCode;
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

use rendezvous_core::dataset::{replay, GameplayLog};
use rendezvous_core::scenario::EpisodeConfig;
use rendezvous_service::{router, AppState};

async fn spawn_server(state: AppState) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move {
        axum::serve(listener, router(state, None)).await.unwrap();
    });
    format!("127.0.0.1:{}", addr.port())
}

async fn create(http: &reqwest::Client, host: &str, body: Value) -> reqwest::Response {
    http.post(format!("http://{host}/sessions")).json(&body).send().await.unwrap()
}

async fn create_id(http: &reqwest::Client, host: &str, body: Value) -> String {
    let resp = create(http, host, body).await;
    assert_eq!(resp.status(), StatusCode::CREATED);
    resp.json::<Value>().await.unwrap()["id"].as_str().unwrap().to_string()
}

async fn post(http: &reqwest::Client, url: String, body: Value) -> reqwest::Response {
    http.post(url).json(&body).send().await.unwrap()
}

async fn next_json<S>(ws: &mut S) -> Option<Value>
where
    S: StreamExt<Item = Result<Message, tokio_tungstenite::tungstenite::Error>> + Unpin,
{
    while let Some(msg) = ws.next().await {
        match msg.unwrap() {
            Message::Text(t) => return Some(serde_json::from_str(&t).unwrap()),
            Message::Close(_) => return None,
            _ => {}
        }
    }
    None
}

#[tokio::test]
async fn invalid_configs_are_rejected() {
    let host = spawn_server(AppState::default()).await;
    let http = reqwest::Client::new();
    let r = create(&http, &host, json!({"evader_threshold": 0.0})).await;
    assert!(r.status().is_client_error(), "{}", r.status());
    let r = create(&http, &host, json!({"time_scale": -1.0})).await;
    assert!(r.status().is_client_error());
    let r = create(&http, &host, json!({"decision_period": "soon"})).await;
    assert!(r.status().is_client_error());
    let r = http.get(format!("http://{host}/sessions/{}/result", uuid_like())).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
}

fn uuid_like() -> &'static str {
    "00000000-0000-4000-8000-000000000000"
}

#[tokio::test]
async fn distinct_ids_and_lifecycle_errors() {
    let host = spawn_server(AppState::default()).await;
    let http = reqwest::Client::new();
    let a = create_id(&http, &host, json!({"seed": 1})).await;
    let b = create_id(&http, &host, json!({"seed": 1})).await;
    assert_ne!(a, b);

    // Not running yet.
    let r = post(&http, format!("http://{host}/sessions/{a}/action"), json!({"ft": "forward", "rt": "none", "dt": "none"})).await;
    assert_eq!(r.status(), StatusCode::CONFLICT);
    let r = http.get(format!("http://{host}/sessions/{a}/result")).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::CONFLICT);

    assert_eq!(post(&http, format!("http://{host}/sessions/{a}/start"), json!({})).await.status(), StatusCode::OK);
    assert_eq!(post(&http, format!("http://{host}/sessions/{a}/start"), json!({})).await.status(), StatusCode::CONFLICT);
    let r = post(&http, format!("http://{host}/sessions/{a}/action"), json!({"ft": "sideways", "rt": "none", "dt": "none"})).await;
    assert!(r.status().is_client_error());
}

#[tokio::test]
async fn stream_cadence_matches_decision_period() {
    let host = spawn_server(AppState::default()).await;
    let http = reqwest::Client::new();
    // 0.5 s ticks at time scale 0.2 → 100 ms wall clock.
    let id = create_id(&http, &host, json!({"seed": 3, "max_duration": 8.0, "time_scale": 0.2})).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{host}/sessions/{id}/stream")).await.unwrap();
    let first = next_json(&mut ws).await.unwrap();
    assert_eq!(first["type"], "state");
    assert_eq!(first["tick"], 0);

    post(&http, format!("http://{host}/sessions/{id}/start"), json!({})).await;
    let mut arrivals = Vec::new();
    let mut ticks = Vec::new();
    let mut done = None;
    while let Some(msg) = next_json(&mut ws).await {
        if msg["type"] == "done" {
            done = Some(msg);
            break;
        }
        arrivals.push(Instant::now());
        ticks.push(msg["tick"].as_u64().unwrap());
        assert!(msg["score"]["total"].as_f64().unwrap() >= 0.0);
        assert!(msg.get("prograde").is_some() && msg.get("range_rate").is_some());
    }
    assert_eq!(ticks, (1..=16).collect::<Vec<_>>());
    let gaps: Vec<f64> = arrivals.windows(2).map(|w| (w[1] - w[0]).as_secs_f64()).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    assert!((mean - 0.1).abs() <= 0.02, "mean interval {mean}");
    let done = done.expect("done message");
    assert_eq!(done["termination"], "time_limit");
    assert_eq!(done["result"]["ticks"], 16);
}

#[tokio::test]
async fn last_write_wins_and_log_replays() {
    let dir = tempfile_dir();
    let host = spawn_server(AppState::new(Some(dir.clone()))).await;
    let http = reqwest::Client::new();
    let body = json!({"seed": 9, "max_duration": 3.0, "time_scale": 0.4});
    let id = create_id(&http, &host, body.clone()).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{host}/sessions/{id}/stream")).await.unwrap();
    next_json(&mut ws).await.unwrap();
    post(&http, format!("http://{host}/sessions/{id}/start"), json!({})).await;

    // Two submissions right after the start: only the second applies at tick 0.
    post(&http, format!("http://{host}/sessions/{id}/action"), json!({"ft": "backward", "rt": "left", "dt": "none"})).await;
    let r = post(&http, format!("http://{host}/sessions/{id}/action"), json!({"ft": "forward", "rt": "none", "dt": "up"})).await;
    assert_eq!(r.status(), StatusCode::ACCEPTED);

    let mut last = None;
    while let Some(msg) = next_json(&mut ws).await {
        last = Some(msg);
    }
    assert_eq!(last.unwrap()["type"], "done");

    let log: GameplayLog = http.get(format!("http://{host}/sessions/{id}/log")).send().await.unwrap().json().await.unwrap();
    assert_eq!(log.meta.agent_kind, "human");
    assert!(log.meta.complete);
    assert_eq!(log.samples.len(), 6);
    log.validate().unwrap();
    let first = log.samples[0].action;
    assert_eq!((first.ft.as_str(), first.rt.as_str(), first.dt.as_str()), ("forward", "none", "up"));
    // Nothing submitted afterwards: coast.
    assert!(log.samples[1..].iter().all(|s| s.action.is_none()));

    let result: Value = http.get(format!("http://{host}/sessions/{id}/result")).send().await.unwrap().json().await.unwrap();
    let config: EpisodeConfig = serde_json::from_value(body).unwrap();
    let replayed = replay(&log, &config).unwrap();
    assert_eq!(result["closest_distance"].as_f64().unwrap(), replayed.summary.closest_distance);

    let r = post(&http, format!("http://{host}/sessions/{id}/action"), json!({"ft": "forward", "rt": "none", "dt": "none"})).await;
    assert_eq!(r.status(), StatusCode::CONFLICT);

    // Log file lands once the engine task finishes.
    let path = dir.join(format!("session_{id}.json"));
    let deadline = Instant::now() + Duration::from_secs(5);
    while !path.exists() && Instant::now() < deadline {
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    let on_disk = GameplayLog::read_json(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(on_disk, log);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let host = spawn_server(AppState::default()).await;
    let http = reqwest::Client::new();
    let a = create_id(&http, &host, json!({"seed": 4, "max_duration": 2.0, "time_scale": 0.2})).await;
    let b = create_id(&http, &host, json!({"seed": 4, "max_duration": 2.0, "time_scale": 0.2})).await;
    for id in [&a, &b] {
        post(&http, format!("http://{host}/sessions/{id}/start"), json!({})).await;
    }
    post(&http, format!("http://{host}/sessions/{a}/action"), json!({"ft": "forward", "rt": "none", "dt": "none"})).await;
    tokio::time::sleep(Duration::from_millis(800)).await;
    let la: GameplayLog = http.get(format!("http://{host}/sessions/{a}/log")).send().await.unwrap().json().await.unwrap();
    let lb: GameplayLog = http.get(format!("http://{host}/sessions/{b}/log")).send().await.unwrap().json().await.unwrap();
    assert!(!la.samples[0].action.is_none());
    assert!(lb.samples.iter().all(|s| s.action.is_none()));
    assert_eq!(la.samples[0].observation, lb.samples[0].observation);
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("rendezvous-service-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
