//! Chat-model pilot harness: prompt construction, the sliding window, the
//! completion backends and reply parsing.

mod client;
mod llm;
mod message;
mod parse;
mod prompt;
mod window;

pub use client::{
    parse_completion_response, CompletionClient, CompletionError, CompletionRequest, FixedClient, HttpClient,
    HttpSettings, OracleClient, ScriptedClient,
};
pub use llm::{
    AgentConfig, CallFailure, Clock, InteractionRecord, LlmAgent, RecordingClock, SystemClock,
};
pub use message::{perform_action_schema, ChatMessage, FunctionCall, Role, FUNCTION_NAME};
pub use parse::{parse_action, parse_action_sequence, ParseFailure};
pub use prompt::{
    build_prompts, call_text, cot_answer, format_observation, question, PromptMode,
    PromptTemplate, COT_SUFFIX,
};
pub use window::{Exchange, SlidingWindow, PADDING_TEXT};
