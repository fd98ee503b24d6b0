use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub const PADDING_TEXT: &str = "N/A";

/// One past (user, assistant) turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub user: String,
    pub assistant: String,
}

impl Exchange {
    pub fn padding() -> Self {
        Self { user: PADDING_TEXT.to_string(), assistant: PADDING_TEXT.to_string() }
    }

    pub fn is_padding(&self) -> bool {
        self.user == PADDING_TEXT && self.assistant == PADDING_TEXT
    }
}

/// The last `capacity` exchanges, oldest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingWindow {
    capacity: usize,
    pad: bool,
    exchanges: VecDeque<Exchange>,
}

impl SlidingWindow {
    /// Padded window of size `capacity`.
    pub fn new(capacity: usize) -> Self {
        Self { capacity, pad: true, exchanges: VecDeque::with_capacity(capacity) }
    }

    pub fn unpadded(capacity: usize) -> Self {
        Self { pad: false, ..Self::new(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Real exchanges retained.
    pub fn len(&self) -> usize {
        self.exchanges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exchanges.is_empty()
    }

    pub fn push(&mut self, exchange: Exchange) {
        if self.capacity == 0 {
            return;
        }
        if self.exchanges.len() == self.capacity {
            self.exchanges.pop_front();
        }
        self.exchanges.push_back(exchange);
    }

    pub fn clear(&mut self) {
        self.exchanges.clear();
    }

    /// History to prepend: padding first, then real exchanges oldest-first.
    /// Exactly `capacity` entries when padding is on.
    pub fn history(&self) -> Vec<Exchange> {
        let missing = if self.pad { self.capacity - self.exchanges.len() } else { 0 };
        std::iter::repeat_with(Exchange::padding)
            .take(missing)
            .chain(self.exchanges.iter().cloned())
            .collect()
    }
}
