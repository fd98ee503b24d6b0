//! Gameplay recording and fine-tuning dataset export.

mod export;
mod log;

pub use export::{
    build_examples, export, split_by_seed, to_alpaca, to_chat_jsonl, verify_examples,
    AlpacaRecord, ChatRecord, DatasetFormat, ExportOptions, TrainingExample,
};
pub use log::{
    record_episode, replay, DatasetError, GameplayLog, GameplayRecorder, LogMeta, Sample,
};
