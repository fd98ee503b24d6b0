//! Scripted expert pilot: center the prograde marker on the target line with
//! the lateral throttles and keep the approach speed within braking limits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{
    Action, DownThrottle, ForwardThrottle, Observation, Pilot, RightThrottle,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavballError {
    #[error("deceleration must be positive, got {0}")]
    NonPositiveDeceleration(f64),
    #[error("invalid navball parameter: {0}")]
    InvalidParams(&'static str),
}

/// Stop distance under uniform deceleration `a` from speed `v0`.
pub fn braking_distance(v0: f64, a: f64) -> Result<f64, NavballError> {
    if !(a > 0.0) {
        return Err(NavballError::NonPositiveDeceleration(a));
    }
    Ok(v0 * v0 / (2.0 * a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NavballParams {
    /// Lateral prograde component above which the bot corrects.
    pub rotation_threshold: f64,
    /// m/s
    pub approach_speed: f64,
    /// Fixed deceleration (m/s²). `None` uses `max_thrust / vehicle_mass`
    /// at every tick.
    pub vessel_acceleration: Option<f64>,
    /// N, used when `vessel_acceleration` is `None`.
    pub max_thrust: f64,
}

impl Default for NavballParams {
    fn default() -> Self {
        Self {
            rotation_threshold: 0.08,
            approach_speed: 10.0,
            vessel_acceleration: None,
            max_thrust: 8000.0,
        }
    }
}

impl NavballParams {
    pub fn validate(&self) -> Result<(), NavballError> {
        if !(self.rotation_threshold > 0.0 && self.rotation_threshold < 1.0) {
            return Err(NavballError::InvalidParams("rotation_threshold must be in (0, 1)"));
        }
        if !(self.approach_speed > 0.0 && self.approach_speed.is_finite()) {
            return Err(NavballError::InvalidParams("approach_speed must be positive"));
        }
        if let Some(a) = self.vessel_acceleration {
            if !(a > 0.0 && a.is_finite()) {
                return Err(NavballError::InvalidParams("vessel_acceleration must be positive"));
            }
        }
        if !(self.max_thrust > 0.0 && self.max_thrust.is_finite()) {
            return Err(NavballError::InvalidParams("max_thrust must be positive"));
        }
        Ok(())
    }

    fn deceleration(&self, obs: &Observation) -> f64 {
        self.vessel_acceleration
            .unwrap_or(self.max_thrust / obs.vehicle_mass)
    }
}

/// One decision of the expert bot. Without a prograde marker it coasts.
pub fn navball_action(obs: &Observation, params: &NavballParams) -> Action {
    let Some(prograde) = obs.prograde else {
        return Action::NONE;
    };
    let thr = params.rotation_threshold;

    let rt = if prograde.x > thr {
        RightThrottle::Left
    } else if prograde.x < -thr {
        RightThrottle::Right
    } else {
        RightThrottle::None
    };
    let dt = if prograde.z > thr {
        DownThrottle::Down
    } else if prograde.z < -thr {
        DownThrottle::Up
    } else {
        DownThrottle::None
    };

    let closing = obs.closing_speed();
    let stop = braking_distance(closing, params.deceleration(obs)).unwrap_or(f64::INFINITY);
    let ft = if obs.range_rate >= 0.0 || stop < obs.range {
        ForwardThrottle::Forward
    } else if closing > params.approach_speed {
        ForwardThrottle::Backward
    } else {
        ForwardThrottle::None
    };

    Action::new(ft, rt, dt)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NavballPilot {
    pub params: NavballParams,
}

impl NavballPilot {
    pub fn new(params: NavballParams) -> Result<Self, NavballError> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Pilot for NavballPilot {
    fn kind(&self) -> &str {
        "navball"
    }

    fn act(&mut self, obs: &Observation) -> Action {
        navball_action(obs, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbital::Vec3;

    fn obs(prograde: Option<Vec3>, range: f64, range_rate: f64) -> Observation {
        Observation {
            time_elapsed: 0.0,
            vehicle_mass: 5000.0,
            vehicle_propellant: 1000.0,
            pursuer_pos: Vec3::ZERO,
            pursuer_vel: Vec3::ZERO,
            evader_pos: Vec3::Y * range,
            evader_vel: Vec3::ZERO,
            prograde,
            range,
            range_rate,
        }
    }

    fn fixed(a: f64, thr: f64) -> NavballParams {
        NavballParams {
            rotation_threshold: thr,
            vessel_acceleration: Some(a),
            ..NavballParams::default()
        }
    }

    #[test]
    fn braking_distance_closed_form() {
        assert_eq!(braking_distance(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(braking_distance(10.0, 1.0).unwrap(), 50.0);
        assert_eq!(braking_distance(20.0, 3.0).unwrap(), 4.0 * braking_distance(10.0, 3.0).unwrap());
        assert!(braking_distance(1.0, 0.0).is_err());
        assert!(braking_distance(1.0, -2.0).is_err());
    }

    #[test]
    fn far_and_slow_goes_forward() {
        let a = navball_action(&obs(Some(Vec3::Y), 1000.0, -10.0), &fixed(1.0, 0.08));
        assert_eq!(a, Action::forward());
    }

    #[test]
    fn rightward_drift_steers_left() {
        let p = Vec3::new(0.2, 0.97, 0.0);
        let a = navball_action(&obs(Some(p), 1000.0, -10.0), &fixed(1.0, 0.1));
        assert_eq!(a.rt, RightThrottle::Left);
        let p = Vec3::new(-0.2, 0.97, 0.3);
        let a = navball_action(&obs(Some(p), 1000.0, -10.0), &fixed(1.0, 0.1));
        assert_eq!(a.rt, RightThrottle::Right);
        assert_eq!(a.dt, DownThrottle::Down);
    }

    #[test]
    fn fast_and_close_brakes() {
        let a = navball_action(&obs(Some(Vec3::Y), 100.0, -30.0), &fixed(1.0, 0.08));
        assert_eq!(a.ft, ForwardThrottle::Backward);
        let a = navball_action(&obs(Some(Vec3::Y), 10.0, -5.0), &fixed(1.0, 0.08));
        assert_eq!(a.ft, ForwardThrottle::None);
    }

    #[test]
    fn separating_always_pushes_forward() {
        let a = navball_action(&obs(Some(-Vec3::Y), 5.0, 40.0), &fixed(1.0, 0.08));
        assert_eq!(a.ft, ForwardThrottle::Forward);
    }

    #[test]
    fn no_prograde_coasts() {
        assert_eq!(navball_action(&obs(None, 100.0, 0.0), &NavballParams::default()), Action::NONE);
    }

    #[test]
    fn default_deceleration_tracks_mass() {
        let p = NavballParams::default();
        let mut o = obs(Some(Vec3::Y), 100.0, -20.0);
        // 8000/5000 = 1.6 m/s² → 125 m to stop, more than the range.
        assert_eq!(navball_action(&o, &p).ft, ForwardThrottle::Backward);
        o.vehicle_mass = 2000.0; // 4 m/s² → 50 m
        assert_eq!(navball_action(&o, &p).ft, ForwardThrottle::Forward);
    }

    #[test]
    fn params_validated() {
        assert!(NavballPilot::new(NavballParams { rotation_threshold: 1.0, ..Default::default() }).is_err());
        assert!(NavballPilot::new(NavballParams { vessel_acceleration: Some(0.0), ..Default::default() }).is_err());
        assert!(NavballPilot::new(NavballParams::default()).is_ok());
    }
}
