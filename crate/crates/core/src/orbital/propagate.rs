use serde::{Deserialize, Serialize};

use super::{BodyConstants, OrbitError, Vec3};

/// Engine limits shared by pursuer and evader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineParams {
    /// Thrust of one axis group at full throttle (N).
    pub max_thrust: f64,
    /// Propellant flow of one axis group at full throttle (kg/s).
    pub max_flow: f64,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            max_thrust: 8000.0,
            max_flow: 1.0,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), OrbitError> {
        if !(self.max_thrust > 0.0 && self.max_thrust.is_finite()) {
            return Err(OrbitError::InvalidEngine("max_thrust must be positive"));
        }
        if !(self.max_flow >= 0.0 && self.max_flow.is_finite()) {
            return Err(OrbitError::InvalidEngine("max_flow must be non-negative"));
        }
        Ok(())
    }

    /// Mass flow for a vessel-frame throttle triple: each axis group burns
    /// `|throttle| * max_flow`.
    pub fn flow_for_throttle(&self, throttle: Vec3) -> f64 {
        (throttle.x.abs() + throttle.y.abs() + throttle.z.abs()) * self.max_flow
    }
}

/// Translational state and mass budget of one spacecraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselState {
    /// m, body frame
    pub position: Vec3,
    /// m/s, body frame
    pub velocity: Vec3,
    /// kg
    pub dry_mass: f64,
    /// kg
    pub propellant: f64,
    /// Set once a burn ran the tanks dry.
    #[serde(default)]
    pub propellant_exhausted: bool,
}

impl VesselState {
    pub fn mass(&self) -> f64 {
        self.dry_mass + self.propellant
    }

    /// Specific orbital energy v²/2 − μ/r.
    pub fn specific_energy(&self, body: &BodyConstants) -> f64 {
        self.velocity.norm_squared() / 2.0 - body.mu / self.position.norm()
    }

    pub fn angular_momentum(&self) -> Vec3 {
        self.position.cross(self.velocity)
    }
}

/// A constant body-frame thrust and the propellant flow it costs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Burn {
    /// N, body frame
    pub thrust: Vec3,
    /// kg/s
    pub mass_flow: f64,
}

impl Burn {
    pub const COAST: Burn = Burn {
        thrust: Vec3::ZERO,
        mass_flow: 0.0,
    };

    pub fn is_coast(&self) -> bool {
        self.thrust == Vec3::ZERO
    }
}

/// Advance `state` by `dt` seconds with one RK4 step under two-body gravity
/// plus the burn's thrust.
///
/// Mass decreases linearly during the burn and each RK4 stage sees the mass at
/// its own stage time. If the tanks run dry mid-step, the step is split: burn
/// until empty, then coast for the remainder, and the result is flagged.
pub fn propagate(
    state: &VesselState,
    burn: Burn,
    body: &BodyConstants,
    dt: f64,
) -> Result<VesselState, OrbitError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OrbitError::InvalidTimeStep(dt));
    }
    if !burn.thrust.is_finite() || !(burn.mass_flow >= 0.0) {
        return Err(OrbitError::NonFinite);
    }

    if burn.is_coast() || state.propellant <= 0.0 {
        let mut next = *state;
        let (p, v) = rk4_step(state.position, state.velocity, body.mu, Vec3::ZERO, state.mass(), 0.0, dt);
        next.position = p;
        next.velocity = v;
        if !burn.is_coast() {
            next.propellant_exhausted = true;
        }
        return Ok(next);
    }

    let needed = burn.mass_flow * dt;
    if needed <= state.propellant {
        let (p, v) = rk4_step(
            state.position,
            state.velocity,
            body.mu,
            burn.thrust,
            state.mass(),
            burn.mass_flow,
            dt,
        );
        let mut next = *state;
        next.position = p;
        next.velocity = v;
        next.propellant = (state.propellant - needed).max(0.0);
        return Ok(next);
    }

    // Runs dry inside this step.
    let burn_time = state.propellant / burn.mass_flow;
    let (p, v) = rk4_step(
        state.position,
        state.velocity,
        body.mu,
        burn.thrust,
        state.mass(),
        burn.mass_flow,
        burn_time,
    );
    let mut next = *state;
    next.propellant = 0.0;
    next.propellant_exhausted = true;
    let (p, v) = rk4_step(p, v, body.mu, Vec3::ZERO, next.mass(), 0.0, dt - burn_time);
    next.position = p;
    next.velocity = v;
    Ok(next)
}

fn acceleration(position: Vec3, mu: f64, thrust: Vec3, mass: f64) -> Vec3 {
    let r = position.norm();
    let gravity = position * (-mu / (r * r * r));
    if thrust == Vec3::ZERO {
        gravity
    } else {
        gravity + thrust / mass
    }
}

fn rk4_step(
    position: Vec3,
    velocity: Vec3,
    mu: f64,
    thrust: Vec3,
    mass0: f64,
    flow: f64,
    dt: f64,
) -> (Vec3, Vec3) {
    let half = dt / 2.0;
    let m_mid = mass0 - flow * half;
    let m_end = mass0 - flow * dt;

    let k1v = acceleration(position, mu, thrust, mass0);
    let k1r = velocity;

    let k2v = acceleration(position + k1r * half, mu, thrust, m_mid);
    let k2r = velocity + k1v * half;

    let k3v = acceleration(position + k2r * half, mu, thrust, m_mid);
    let k3r = velocity + k2v * half;

    let k4v = acceleration(position + k3r * dt, mu, thrust, m_end);
    let k4r = velocity + k3v * dt;

    let sixth = dt / 6.0;
    let position = position + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * sixth;
    let velocity = velocity + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * sixth;
    (position, velocity)
}
