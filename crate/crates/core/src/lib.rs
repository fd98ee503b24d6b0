//! Desk-scale pursuit–evasion rendezvous lab.
//!
//! [`orbital`] holds the two-body mechanics, [`scenario`] the E3 episode,
//! [`navball`] the scripted expert pilot, [`agent`] the language-model pilot
//! harness, [`dataset`] gameplay recording and fine-tuning exports, and
//! [`eval`] campaign running and metrics.

pub mod orbital;
pub mod scenario;
pub mod navball;
pub mod agent;
pub mod dataset;
pub mod eval;
