use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::log::{DatasetError, GameplayLog};
use crate::agent::{
    call_text, cot_answer, parse_action_sequence, ChatMessage, Exchange, PromptMode,
    PromptTemplate, PADDING_TEXT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    ChatJsonl,
    Alpaca,
}

impl std::str::FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chat-jsonl" => Ok(DatasetFormat::ChatJsonl),
            "alpaca" => Ok(DatasetFormat::Alpaca),
            other => Err(format!("unknown dataset format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportOptions {
    pub mode: PromptMode,
    /// Past exchanges per record, padded.
    pub window: usize,
    /// Future actions in each output; 1 is the plain export.
    pub lookahead: usize,
    /// Prefix outputs with template reasoning.
    pub cot: bool,
    /// Prefix user texts with `HUMAN:`.
    pub keywords: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self { mode: PromptMode::Augmented, window: 0, lookahead: 1, cot: false, keywords: false }
    }
}

impl ExportOptions {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.lookahead == 0 {
            return Err(DatasetError::InvalidOptions("lookahead must be at least 1".into()));
        }
        Ok(())
    }
}

/// Format-neutral training record, traceable to `(seed, tick)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub seed: u64,
    pub tick: u64,
    pub system: String,
    pub history: Vec<Exchange>,
    pub user: String,
    pub output: String,
}

/// Exactly the four Alpaca fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlpacaRecord {
    pub instruction: String,
    pub output: String,
    pub system: String,
    pub history: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatRecord {
    pub messages: Vec<ChatMessage>,
}

fn human(text: String, keywords: bool) -> String {
    if keywords {
        format!("HUMAN: {text}")
    } else {
        text
    }
}

fn history_user(text: String, keywords: bool) -> String {
    // Padding stays literal so it is recognizable after export.
    if text == PADDING_TEXT {
        text
    } else {
        human(text, keywords)
    }
}

/// One example per sample that has `lookahead - 1` successors.
pub fn build_examples(log: &GameplayLog, opts: &ExportOptions) -> Result<Vec<TrainingExample>, DatasetError> {
    opts.validate()?;
    log.validate()?;
    let template = PromptTemplate::for_mode(opts.mode);
    let samples = &log.samples;
    let count = (samples.len() + 1).saturating_sub(opts.lookahead);

    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let sample = &samples[i];
        let mut output = if opts.cot {
            cot_answer(sample.observation.prograde, &sample.action)
        } else {
            call_text(&sample.action)
        };
        for future in &samples[i + 1..i + opts.lookahead] {
            output.push('\n');
            output.push_str(&call_text(&future.action));
        }

        let real = &samples[i.saturating_sub(opts.window)..i];
        let history = std::iter::repeat_with(Exchange::padding)
            .take(opts.window - real.len())
            .chain(real.iter().map(|s| Exchange {
                user: template.history_prompt(&s.observation),
                assistant: call_text(&s.action),
            }))
            .map(|e| Exchange { user: history_user(e.user, opts.keywords), assistant: e.assistant })
            .collect();

        out.push(TrainingExample {
            seed: log.meta.seed,
            tick: sample.tick,
            system: template.system_text.clone(),
            history,
            user: human(template.user_prompt(&sample.observation), opts.keywords),
            output,
        });
    }
    Ok(out)
}

impl TrainingExample {
    pub fn to_chat(&self) -> ChatRecord {
        let mut messages = vec![ChatMessage::system(self.system.clone())];
        for e in &self.history {
            messages.push(ChatMessage::user(e.user.clone()));
            messages.push(ChatMessage::assistant(e.assistant.clone()));
        }
        messages.push(ChatMessage::user(self.user.clone()));
        messages.push(ChatMessage::assistant(self.output.clone()));
        ChatRecord { messages }
    }

    pub fn to_alpaca(&self) -> AlpacaRecord {
        AlpacaRecord {
            instruction: format!("\n{}", self.user),
            output: self.output.clone(),
            system: self.system.clone(),
            history: self.history.iter().map(|e| (e.user.clone(), e.assistant.clone())).collect(),
        }
    }
}

/// One `{"messages": [...]}` object per line.
pub fn to_chat_jsonl(examples: &[TrainingExample]) -> Result<String, DatasetError> {
    let mut out = String::new();
    for e in examples {
        out.push_str(&serde_json::to_string(&e.to_chat())?);
        out.push('\n');
    }
    Ok(out)
}

/// A JSON array of Alpaca records.
pub fn to_alpaca(examples: &[TrainingExample]) -> Result<String, DatasetError> {
    let records: Vec<AlpacaRecord> = examples.iter().map(TrainingExample::to_alpaca).collect();
    let mut out = serde_json::to_string_pretty(&records)?;
    out.push('\n');
    Ok(out)
}

pub fn export(examples: &[TrainingExample], format: DatasetFormat) -> Result<String, DatasetError> {
    match format {
        DatasetFormat::ChatJsonl => to_chat_jsonl(examples),
        DatasetFormat::Alpaca => to_alpaca(examples),
    }
}

/// Rebuild every example from its source log and check it matches exactly,
/// including that the output decodes to the logged future actions.
pub fn verify_examples(
    examples: &[TrainingExample],
    logs: &[GameplayLog],
    opts: &ExportOptions,
) -> Result<(), DatasetError> {
    let mut rebuilt: BTreeMap<u64, Vec<TrainingExample>> = BTreeMap::new();
    for (index, ex) in examples.iter().enumerate() {
        let log = logs
            .iter()
            .find(|l| l.meta.seed == ex.seed)
            .ok_or_else(|| DatasetError::Provenance { index, reason: format!("no log for seed {}", ex.seed) })?;
        let tick = ex.tick as usize;
        let Some(future) = log.samples.get(tick..tick + opts.lookahead) else {
            return Err(DatasetError::Provenance { index, reason: format!("tick {tick} out of range") });
        };
        let decoded = parse_action_sequence(&ex.output)
            .map_err(|e| DatasetError::Provenance { index, reason: e.to_string() })?;
        let expected: Vec<_> = future.iter().map(|s| s.action).collect();
        if decoded.len() != expected.len()
            || decoded.iter().zip(&expected).any(|(a, b)| !a.same_labels(b))
        {
            return Err(DatasetError::Provenance { index, reason: "decoded actions differ".into() });
        }
        let source = match rebuilt.entry(ex.seed) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(build_examples(log, opts)?),
        };
        if source.get(tick) != Some(ex) {
            return Err(DatasetError::Provenance { index, reason: "rebuilt record differs".into() });
        }
    }
    Ok(())
}

/// Deterministic split by seed: the first `fraction` of distinct seeds
/// (ascending) go to the first set.
pub fn split_by_seed(examples: Vec<TrainingExample>, fraction: f64) -> (Vec<TrainingExample>, Vec<TrainingExample>) {
    let seeds: Vec<u64> = examples.iter().map(|e| e.seed).collect::<BTreeSet<_>>().into_iter().collect();
    let cut = ((seeds.len() as f64) * fraction.clamp(0.0, 1.0)).round() as usize;
    let train: BTreeSet<u64> = seeds[..cut].iter().copied().collect();
    examples.into_iter().partition(|e| train.contains(&e.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::record_episode;
    use crate::navball::NavballPilot;
    use crate::scenario::EpisodeConfig;

    fn short_log(seed: u64) -> GameplayLog {
        let mut cfg = EpisodeConfig::with_seed(seed);
        cfg.max_duration = 5.0;
        record_episode(&cfg, &mut NavballPilot::default(), serde_json::Value::Null).unwrap()
    }

    #[test]
    fn window_padding_and_order() {
        let log = short_log(2);
        let ex = build_examples(&log, &ExportOptions { window: 3, ..Default::default() }).unwrap();
        assert_eq!(ex.len(), 10);
        assert!(ex[0].history.iter().all(Exchange::is_padding));
        assert_eq!(ex[1].history.iter().filter(|e| e.is_padding()).count(), 2);
        assert_eq!(ex[5].history.len(), 3);
        assert!(ex[5].history.iter().all(|e| !e.is_padding()));
        assert_eq!(ex[5].history[2].assistant, call_text(&log.samples[4].action));
    }

    #[test]
    fn window_zero_is_identity() {
        let log = short_log(2);
        let ex = build_examples(&log, &ExportOptions::default()).unwrap();
        assert!(ex.iter().all(|e| e.history.is_empty()));
        assert!(ex.iter().zip(&log.samples).all(|(e, s)| e.output == call_text(&s.action)));
    }

    #[test]
    fn lookahead_drops_tail() {
        let log = short_log(3);
        let opts = ExportOptions { lookahead: 3, ..Default::default() };
        let ex = build_examples(&log, &opts).unwrap();
        assert_eq!(ex.len(), 8);
        verify_examples(&ex, &[log], &opts).unwrap();
        assert!(build_examples(&short_log(3), &ExportOptions { lookahead: 0, ..Default::default() }).is_err());
    }

    #[test]
    fn alpaca_fields_and_keywords() {
        let log = short_log(4);
        let ex = build_examples(&log, &ExportOptions { keywords: true, window: 1, ..Default::default() }).unwrap();
        let text = to_alpaca(&ex).unwrap();
        let v: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_str(&text).unwrap();
        let keys: Vec<_> = v[0].keys().cloned().collect();
        assert_eq!(keys, ["history", "instruction", "output", "system"]);
        assert!(v[0]["instruction"].as_str().unwrap().starts_with("\nHUMAN: Given these observations"));
        assert_eq!(v[0]["history"], serde_json::json!([["N/A", "N/A"]]));
    }

    #[test]
    fn cot_outputs_round_trip() {
        let log = short_log(5);
        let opts = ExportOptions { cot: true, ..Default::default() };
        let ex = build_examples(&log, &opts).unwrap();
        assert!(ex[0].output.contains("coordinate of prograde"));
        verify_examples(&ex, std::slice::from_ref(&log), &opts).unwrap();
        assert_eq!(to_chat_jsonl(&ex).unwrap(), to_chat_jsonl(&build_examples(&log, &opts).unwrap()).unwrap());
    }

    #[test]
    fn tampered_record_fails_verification() {
        let log = short_log(6);
        let opts = ExportOptions::default();
        let mut ex = build_examples(&log, &opts).unwrap();
        ex[4].user.push('!');
        assert!(matches!(verify_examples(&ex, &[log], &opts), Err(DatasetError::Provenance { index: 4, .. })));
    }

    #[test]
    fn split_is_by_seed() {
        let mut all = Vec::new();
        for seed in [9, 1, 5, 3] {
            all.extend(build_examples(&short_log(seed), &ExportOptions::default()).unwrap());
        }
        let (train, val) = split_by_seed(all, 0.5);
        assert!(train.iter().all(|e| e.seed == 1 || e.seed == 3));
        assert!(val.iter().all(|e| e.seed == 5 || e.seed == 9));
    }
}
