use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::scenario::{DownThrottle, ForwardThrottle, RightThrottle};

pub const FUNCTION_NAME: &str = "perform_action";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// Structured function call attached to an assistant reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCall {
    pub name: String,
    pub arguments: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function_call: Option<FunctionCall>,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into(), function_call: None }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into(), function_call: None }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into(), function_call: None }
    }

    pub fn assistant_call(call: FunctionCall) -> Self {
        Self { role: Role::Assistant, content: String::new(), function_call: Some(call) }
    }
}

/// Declaration of the `perform_action` tool in chat-completions wire form.
pub fn perform_action_schema() -> Value {
    json!({
        "type": "function",
        "function": {
            "name": FUNCTION_NAME,
            "description": "Apply discrete throttles in the vessel frame for the next decision period.",
            "parameters": {
                "type": "object",
                "properties": {
                    "ft": {
                        "type": "string",
                        "enum": ForwardThrottle::LABELS,
                        "description": "Forward throttle along the y axis (towards the target)."
                    },
                    "rt": {
                        "type": "string",
                        "enum": RightThrottle::LABELS,
                        "description": "Right throttle along the x axis."
                    },
                    "dt": {
                        "type": "string",
                        "enum": DownThrottle::LABELS,
                        "description": "Down throttle along the z axis."
                    }
                },
                "required": ["ft", "rt", "dt"],
                "additionalProperties": false
            }
        }
    })
}
