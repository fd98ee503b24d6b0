use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::message::{ChatMessage, FUNCTION_NAME};
use crate::scenario::{Action, DownThrottle, ForwardThrottle, RightThrottle};

/// Why a reply yielded no action.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum ParseFailure {
    #[error("unknown throttle label '{0}'")]
    UnknownLabel(String),
    #[error("contradictory directions on the {0} axis")]
    Contradictory(String),
    #[error("no action found in reply")]
    NoAction,
    #[error("malformed call: {0}")]
    MalformedCall(String),
    #[error("unexpected function '{0}'")]
    WrongFunction(String),
}

impl ParseFailure {
    pub fn kind(&self) -> &'static str {
        match self {
            ParseFailure::UnknownLabel(_) => "unknown_label",
            ParseFailure::Contradictory(_) => "contradictory",
            ParseFailure::NoAction => "no_action",
            ParseFailure::MalformedCall(_) => "malformed_call",
            ParseFailure::WrongFunction(_) => "wrong_function",
        }
    }
}

fn label<T: std::str::FromStr>(value: &str) -> Result<T, ParseFailure> {
    value
        .trim()
        .to_ascii_lowercase()
        .parse()
        .map_err(|_| ParseFailure::UnknownLabel(value.to_string()))
}

fn action_from_args(args: &BTreeMap<String, String>) -> Result<Action, ParseFailure> {
    if let Some(extra) = args.keys().find(|k| !matches!(k.as_str(), "ft" | "rt" | "dt")) {
        return Err(ParseFailure::MalformedCall(format!("unexpected argument '{extra}'")));
    }
    let get = |key: &str| {
        args.get(key)
            .ok_or_else(|| ParseFailure::MalformedCall(format!("missing argument '{key}'")))
    };
    Ok(Action::new(
        label::<ForwardThrottle>(get("ft")?)?,
        label::<RightThrottle>(get("rt")?)?,
        label::<DownThrottle>(get("dt")?)?,
    ))
}

fn unquote(s: &str) -> &str {
    s.trim().trim_matches(|c| matches!(c, '"' | '\'' | '`')).trim()
}

/// Arguments between the parentheses of a textual call. Accepts a JSON object,
/// an object with unquoted keys/values, or `key=value` pairs.
fn parse_call_args(inner: &str) -> Result<BTreeMap<String, String>, ParseFailure> {
    let inner = inner.trim();
    if let Ok(map) = serde_json::from_str::<BTreeMap<String, String>>(inner) {
        return Ok(map);
    }
    let body = inner
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(inner);
    let mut map = BTreeMap::new();
    for pair in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = pair
            .split_once([':', '='])
            .ok_or_else(|| ParseFailure::MalformedCall(format!("bad argument '{}'", pair.trim())))?;
        let key = unquote(key).to_ascii_lowercase();
        if map.insert(key.clone(), unquote(value).to_string()).is_some() {
            return Err(ParseFailure::MalformedCall(format!("duplicate argument '{key}'")));
        }
    }
    if map.is_empty() {
        return Err(ParseFailure::MalformedCall("no arguments".into()));
    }
    Ok(map)
}

/// Every textual `perform_action(...)` call in order of appearance.
fn textual_calls(text: &str) -> Vec<Result<Action, ParseFailure>> {
    let opener = format!("{FUNCTION_NAME}(");
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find(&opener) {
        let after = &rest[start + opener.len()..];
        match after.find(')') {
            Some(end) => {
                out.push(parse_call_args(&after[..end]).and_then(|a| action_from_args(&a)));
                rest = &after[end + 1..];
            }
            None => {
                out.push(Err(ParseFailure::MalformedCall("unterminated call".into())));
                break;
            }
        }
    }
    out
}

fn last_sentence(text: &str) -> &str {
    let terminators = ['.', '!', '?', '\n'];
    let trimmed = text.trim_end_matches(|c: char| c.is_whitespace() || terminators.contains(&c));
    match trimmed.rfind(terminators) {
        Some(i) => &trimmed[i + 1..],
        None => trimmed,
    }
}

/// Direction keywords in the last sentence, at most one per axis.
fn keyword_action(text: &str) -> Result<Action, ParseFailure> {
    let mut ft: Option<ForwardThrottle> = None;
    let mut rt: Option<RightThrottle> = None;
    let mut dt: Option<DownThrottle> = None;
    let mut saw_none = false;

    fn set<T: PartialEq + Copy>(slot: &mut Option<T>, v: T, axis: &str) -> Result<(), ParseFailure> {
        match slot {
            Some(prev) if *prev != v => Err(ParseFailure::Contradictory(axis.to_string())),
            _ => {
                *slot = Some(v);
                Ok(())
            }
        }
    }

    for token in last_sentence(text)
        .split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| !t.is_empty())
    {
        match token.to_ascii_lowercase().as_str() {
            "forward" => set(&mut ft, ForwardThrottle::Forward, "forward")?,
            "backward" => set(&mut ft, ForwardThrottle::Backward, "forward")?,
            "right" => set(&mut rt, RightThrottle::Right, "right")?,
            "left" => set(&mut rt, RightThrottle::Left, "right")?,
            "up" => set(&mut dt, DownThrottle::Up, "down")?,
            "down" => set(&mut dt, DownThrottle::Down, "down")?,
            "none" => saw_none = true,
            _ => {}
        }
    }
    if ft.is_none() && rt.is_none() && dt.is_none() {
        return if saw_none { Ok(Action::NONE) } else { Err(ParseFailure::NoAction) };
    }
    Ok(Action::new(
        ft.unwrap_or(ForwardThrottle::None),
        rt.unwrap_or(RightThrottle::None),
        dt.unwrap_or(DownThrottle::None),
    ))
}

/// Extract an action from an assistant reply.
///
/// Order: structured function call, then the first textual call, then
/// direction keywords in the last sentence. A call that is present but
/// unusable is a failure; the keyword scan only runs when no call exists.
pub fn parse_action(reply: &ChatMessage) -> Result<Action, ParseFailure> {
    if let Some(call) = &reply.function_call {
        if call.name != FUNCTION_NAME {
            return Err(ParseFailure::WrongFunction(call.name.clone()));
        }
        return action_from_args(&call.arguments);
    }
    match textual_calls(&reply.content).into_iter().next() {
        Some(first) => first,
        None => keyword_action(&reply.content),
    }
}

/// All textual calls in `text`, e.g. a look-ahead output with one call per line.
pub fn parse_action_sequence(text: &str) -> Result<Vec<Action>, ParseFailure> {
    let calls = textual_calls(text);
    if calls.is_empty() {
        return Err(ParseFailure::NoAction);
    }
    calls.into_iter().collect()
}
