use crate::orbital::{Burn, EngineParams, Vec3, VesselState};

/// E3 evader: full thrust straight away from the pursuer while the pursuer is
/// strictly inside `threshold`, otherwise coast.
pub fn evader_policy_e3(evader: &VesselState, pursuer: &VesselState, threshold: f64, max_thrust: f64) -> Vec3 {
    let away = evader.position - pursuer.position;
    if away.norm() < threshold {
        away.unit().map(|dir| dir * max_thrust).unwrap_or(Vec3::ZERO)
    } else {
        Vec3::ZERO
    }
}

pub(crate) fn evader_burn(
    evader: &VesselState,
    pursuer: &VesselState,
    threshold: f64,
    engine: &EngineParams,
) -> Burn {
    let thrust = evader_policy_e3(evader, pursuer, threshold, engine.max_thrust);
    if thrust == Vec3::ZERO {
        Burn::COAST
    } else {
        Burn {
            thrust,
            mass_flow: engine.max_flow,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: f64) -> VesselState {
        VesselState {
            position: Vec3::new(700_000.0 + x, 0.0, 0.0),
            velocity: Vec3::ZERO,
            dry_mass: 4000.0,
            propellant: 1000.0,
            propellant_exhausted: false,
        }
    }

    #[test]
    fn tie_at_threshold_does_not_trigger() {
        assert_eq!(evader_policy_e3(&at(400.0), &at(0.0), 400.0, 8000.0), Vec3::ZERO);
    }

    #[test]
    fn inside_threshold_full_thrust_away() {
        let t = evader_policy_e3(&at(200.0), &at(0.0), 400.0, 8000.0);
        assert!((t.norm() - 8000.0).abs() < 1e-9);
        assert!(t.x > 0.0);
    }

    #[test]
    fn far_pursuer_ignored() {
        assert_eq!(evader_policy_e3(&at(4000.0), &at(0.0), 400.0, 8000.0), Vec3::ZERO);
    }
}
