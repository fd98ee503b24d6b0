use std::collections::{BTreeMap, VecDeque};
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use super::message::{ChatMessage, FunctionCall, Role, FUNCTION_NAME};
use crate::navball::{navball_action, NavballParams};
use crate::scenario::Observation;

/// Transport-level failure of a completion call.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("request timed out")]
    Timeout,
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("authentication rejected: {0}")]
    Auth(String),
    #[error("transport error: {0}")]
    Transport(String),
}

impl CompletionError {
    pub fn kind(&self) -> &'static str {
        match self {
            CompletionError::Timeout => "timeout",
            CompletionError::Protocol(_) => "protocol",
            CompletionError::Auth(_) => "auth",
            CompletionError::Transport(_) => "transport",
        }
    }
}

/// Everything a backend may use to answer one decision.
#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    pub messages: &'a [ChatMessage],
    pub schema: &'a Value,
    /// The observation the prompts were built from.
    pub observation: &'a Observation,
}

pub trait CompletionClient {
    fn complete(&mut self, request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError>;
}

impl<C: CompletionClient + ?Sized> CompletionClient for Box<C> {
    fn complete(&mut self, request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError> {
        (**self).complete(request)
    }
}

/// Returns queued replies in order; errors once the queue is empty.
#[derive(Debug, Clone, Default)]
pub struct ScriptedClient {
    replies: VecDeque<Result<ChatMessage, CompletionError>>,
    requests: Vec<Vec<ChatMessage>>,
}

impl ScriptedClient {
    pub fn new(replies: impl IntoIterator<Item = Result<ChatMessage, CompletionError>>) -> Self {
        Self { replies: replies.into_iter().collect(), requests: Vec::new() }
    }

    /// Plain-text assistant replies.
    pub fn from_texts<S: Into<String>>(texts: impl IntoIterator<Item = S>) -> Self {
        Self::new(texts.into_iter().map(|t| Ok(ChatMessage::assistant(t))))
    }

    /// Message lists received so far.
    pub fn requests(&self) -> &[Vec<ChatMessage>] {
        &self.requests
    }
}

impl CompletionClient for ScriptedClient {
    fn complete(&mut self, request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError> {
        self.requests.push(request.messages.to_vec());
        self.replies
            .pop_front()
            .unwrap_or_else(|| Err(CompletionError::Protocol("script exhausted".into())))
    }
}

/// Gives the same reply to every request.
#[derive(Debug, Clone)]
pub struct FixedClient {
    pub reply: ChatMessage,
}

impl FixedClient {
    pub fn text(text: impl Into<String>) -> Self {
        Self { reply: ChatMessage::assistant(text) }
    }
}

impl CompletionClient for FixedClient {
    fn complete(&mut self, _request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError> {
        Ok(self.reply.clone())
    }
}

/// Answers every request with the navball bot's choice as a function call.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleClient {
    pub params: NavballParams,
}

impl CompletionClient for OracleClient {
    fn complete(&mut self, request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError> {
        let action = navball_action(request.observation, &self.params);
        let arguments = BTreeMap::from([
            ("ft".to_string(), action.ft.to_string()),
            ("rt".to_string(), action.rt.to_string()),
            ("dt".to_string(), action.dt.to_string()),
        ]);
        Ok(ChatMessage::assistant_call(FunctionCall { name: FUNCTION_NAME.into(), arguments }))
    }
}

/// Settings for a remote chat-completions endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HttpSettings {
    /// Base URL, e.g. `http://localhost:8000/v1`; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout: Duration,
    pub api_key: Option<String>,
}

/// Blocking client for an OpenAI-compatible `/chat/completions` endpoint.
pub struct HttpClient {
    settings: HttpSettings,
    http: reqwest::blocking::Client,
}

impl HttpClient {
    /// Falls back to `LLM_API_KEY` when no key is configured.
    pub fn new(mut settings: HttpSettings) -> Result<Self, CompletionError> {
        if settings.api_key.is_none() {
            settings.api_key = std::env::var("LLM_API_KEY").ok().filter(|k| !k.is_empty());
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(settings.timeout)
            .build()
            .map_err(|e| CompletionError::Transport(e.to_string()))?;
        Ok(Self { settings, http })
    }

    pub fn url(&self) -> String {
        format!("{}/chat/completions", self.settings.endpoint.trim_end_matches('/'))
    }

    /// JSON request body for `messages`.
    pub fn request_body(&self, messages: &[ChatMessage], schema: &Value) -> Value {
        let messages: Vec<Value> = messages
            .iter()
            .map(|m| json!({"role": m.role.as_str(), "content": m.content}))
            .collect();
        json!({
            "model": self.settings.model,
            "messages": messages,
            "tools": [schema],
            "tool_choice": "auto",
            "temperature": self.settings.temperature,
        })
    }
}

fn string_map(arguments: &Value) -> Result<BTreeMap<String, String>, CompletionError> {
    // Arguments arrive as a JSON-encoded string per the wire format, but some
    // servers send the object directly.
    let object = match arguments {
        Value::String(s) => serde_json::from_str::<Value>(s)
            .map_err(|e| CompletionError::Protocol(format!("bad arguments JSON: {e}")))?,
        other => other.clone(),
    };
    let Value::Object(map) = object else {
        return Err(CompletionError::Protocol("arguments are not an object".into()));
    };
    Ok(map
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                Value::String(s) => s,
                other => other.to_string(),
            };
            (k, v)
        })
        .collect())
}

/// Assistant message from a chat-completions response body.
pub fn parse_completion_response(body: &Value) -> Result<ChatMessage, CompletionError> {
    let message = body
        .pointer("/choices/0/message")
        .ok_or_else(|| CompletionError::Protocol("response has no choices[0].message".into()))?;
    let content = message.get("content").and_then(Value::as_str).unwrap_or_default().to_string();
    let call = message
        .pointer("/tool_calls/0/function")
        .or_else(|| message.get("function_call"))
        .filter(|c| !c.is_null());
    let function_call = match call {
        Some(c) => Some(FunctionCall {
            name: c.get("name").and_then(Value::as_str).unwrap_or_default().to_string(),
            arguments: string_map(c.get("arguments").unwrap_or(&Value::Null))?,
        }),
        None => None,
    };
    Ok(ChatMessage { role: Role::Assistant, content, function_call })
}

impl CompletionClient for HttpClient {
    fn complete(&mut self, request: &CompletionRequest<'_>) -> Result<ChatMessage, CompletionError> {
        let mut builder = self.http.post(self.url()).json(&self.request_body(request.messages, request.schema));
        if let Some(key) = &self.settings.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder.send().map_err(|e| {
            if e.is_timeout() {
                CompletionError::Timeout
            } else {
                CompletionError::Transport(e.to_string())
            }
        })?;
        let status = response.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err(CompletionError::Auth(status.to_string()));
        }
        if !status.is_success() {
            return Err(CompletionError::Protocol(format!("HTTP {status}")));
        }
        let body: Value = response.json().map_err(|e| {
            if e.is_timeout() {
                CompletionError::Timeout
            } else {
                CompletionError::Protocol(e.to_string())
            }
        })?;
        parse_completion_response(&body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::message::perform_action_schema;

    #[test]
    fn tool_call_response() {
        let body = json!({"choices": [{"message": {"role": "assistant", "content": null,
            "tool_calls": [{"id": "c1", "type": "function", "function": {"name": "perform_action",
            "arguments": "{\"ft\": \"forward\", \"rt\": \"none\", \"dt\": \"up\"}"}}]}}]});
        let m = parse_completion_response(&body).unwrap();
        let call = m.function_call.unwrap();
        assert_eq!(call.name, "perform_action");
        assert_eq!(call.arguments["dt"], "up");
        assert_eq!(m.content, "");
    }

    #[test]
    fn legacy_function_call_and_text() {
        let body = json!({"choices": [{"message": {"role": "assistant", "content": "thinking",
            "function_call": {"name": "perform_action", "arguments": {"ft": "none", "rt": "left", "dt": "none"}}}}]});
        let m = parse_completion_response(&body).unwrap();
        assert_eq!(m.content, "thinking");
        assert_eq!(m.function_call.unwrap().arguments["rt"], "left");
        let body = json!({"choices": [{"message": {"role": "assistant", "content": "go left"}}]});
        assert!(parse_completion_response(&body).unwrap().function_call.is_none());
    }

    #[test]
    fn malformed_responses_are_protocol_errors() {
        assert!(matches!(parse_completion_response(&json!({})), Err(CompletionError::Protocol(_))));
        let body = json!({"choices": [{"message": {"tool_calls": [{"function": {"name": "perform_action", "arguments": "{not json"}}]}}]});
        assert!(matches!(parse_completion_response(&body), Err(CompletionError::Protocol(_))));
    }

    #[test]
    fn scripted_client_runs_dry() {
        let obs = crate::scenario::Episode::reset(crate::scenario::EpisodeConfig::with_seed(0))
            .unwrap()
            .observation()
            .clone();
        let schema = perform_action_schema();
        let req = CompletionRequest { messages: &[], schema: &schema, observation: &obs };
        let mut c = ScriptedClient::from_texts(["a"]);
        assert_eq!(c.complete(&req).unwrap().content, "a");
        assert!(matches!(c.complete(&req), Err(CompletionError::Protocol(_))));
        assert_eq!(c.requests().len(), 2);
    }
}
