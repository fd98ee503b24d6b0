use super::{ScenarioError, ScoreWeights};

/// Score = Σ (scale·c)^exponent over distance, speed, fuel and time. Lower is better.
pub fn compute_score(
    distance: f64,
    speed: f64,
    fuel: f64,
    time: f64,
    weights: &ScoreWeights,
) -> Result<f64, ScenarioError> {
    for (name, value) in [("distance", distance), ("speed", speed), ("fuel", fuel), ("time", time)] {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(ScenarioError::NegativeScoreComponent(name, value));
        }
    }
    Ok(weights.distance.eval(distance)
        + weights.velocity.eval(speed)
        + weights.fuel.eval(fuel)
        + weights.time.eval(time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_components_score_zero() {
        assert_eq!(compute_score(0.0, 0.0, 0.0, 0.0, &ScoreWeights::default()).unwrap(), 0.0);
    }

    #[test]
    fn hand_evaluated_terms() {
        // 10² + 5^1.5 + 10^1.25 + 1
        let s = compute_score(100.0, 10.0, 100.0, 100.0, &ScoreWeights::default()).unwrap();
        let expected = 100.0 + 11.180_339_887 + 17.782_794_100 + 1.0;
        assert!((s - expected).abs() < 1e-6, "{s}");
        assert!((s - 129.9631).abs() < 1e-3);
    }

    #[test]
    fn time_term_is_linear() {
        let w = ScoreWeights::default();
        let a = compute_score(10.0, 2.0, 30.0, 100.0, &w).unwrap();
        let b = compute_score(10.0, 2.0, 30.0, 200.0, &w).unwrap();
        assert!(((b - a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_component_rejected() {
        let r = compute_score(-1.0, 0.0, 0.0, 0.0, &ScoreWeights::default());
        assert!(matches!(r, Err(ScenarioError::NegativeScoreComponent("distance", _))));
    }
}
