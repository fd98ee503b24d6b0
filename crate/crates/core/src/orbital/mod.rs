//! Two-body orbital mechanics: element/state conversion, RK4 propagation
//! under thrust, the pursuer-centred vessel frame and prograde, and seeded
//! pursuer orbit generation.

mod elements;
mod frame;
mod generate;
mod propagate;
mod vec3;

pub use elements::{
    elements_to_state, normalize_angle, state_to_elements, vis_viva_speed, BodyConstants,
    OrbitalElements,
};
pub use frame::{compute_prograde, vessel_frame, FrameBasis};
pub use generate::{generate_orbit, OrbitConstraints, OrbitGenerator, MAX_GENERATION_ATTEMPTS};
pub use propagate::{propagate, Burn, EngineParams, VesselState};
pub use vec3::Vec3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbitError {
    #[error("orbit is not elliptic (e = {0})")]
    NotElliptic(f64),
    #[error("semi-major axis must be positive, got {0}")]
    InvalidSemiMajorAxis(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid body constants: {0}")]
    InvalidBody(&'static str),
    #[error("invalid engine parameters: {0}")]
    InvalidEngine(&'static str),
    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),
    #[error("degenerate vessel frame: {0}")]
    DegenerateFrame(&'static str),
    #[error("pursuer and evader have zero relative velocity")]
    ZeroRelativeVelocity,
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("invalid orbit constraints: {0}")]
    InvalidConstraints(&'static str),
    #[error("no orbit satisfied the constraints after {0} attempts")]
    GenerationExhausted(usize),
}
