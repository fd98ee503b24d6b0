use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::scenario::Action;

/// Probability floor for the one-hot prediction.
pub const PROBABILITY_FLOOR: f64 = f64::EPSILON;

fn check_lengths(predicted: &[Action], truth: &[Action]) -> Result<(), EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::LengthMismatch { predicted: predicted.len(), truth: truth.len() });
    }
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

/// Fraction of samples whose full (ft, rt, dt) triple matches.
pub fn action_accuracy(predicted: &[Action], truth: &[Action]) -> Result<f64, EvalError> {
    check_lengths(predicted, truth)?;
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p.same_labels(t)).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Mean of −ln p(truth) where the prediction is a one-hot over the 27 joint
/// classes with probabilities clamped to `[PROBABILITY_FLOOR, 1]`.
pub fn cross_entropy(predicted: &[Action], truth: &[Action]) -> Result<f64, EvalError> {
    check_lengths(predicted, truth)?;
    let total: f64 = predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| {
            let prob: f64 = if p.class_index() == t.class_index() { 1.0 } else { 0.0 };
            -prob.clamp(PROBABILITY_FLOOR, 1.0).ln()
        })
        .sum();
    Ok(total / truth.len() as f64)
}

/// Best (lowest), mean and population standard deviation of call latencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub best_ms: f64,
    pub avg_ms: f64,
    pub stddev_ms: f64,
}

pub fn latency_stats(latencies_ms: &[f64]) -> Option<LatencyStats> {
    if latencies_ms.is_empty() {
        return None;
    }
    let n = latencies_ms.len() as f64;
    let avg = latencies_ms.iter().sum::<f64>() / n;
    let var = latencies_ms.iter().map(|l| (l - avg).powi(2)).sum::<f64>() / n;
    Some(LatencyStats {
        count: latencies_ms.len(),
        best_ms: latencies_ms.iter().copied().fold(f64::INFINITY, f64::min),
        avg_ms: avg,
        stddev_ms: var.sqrt(),
    })
}
