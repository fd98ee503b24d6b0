use serde::{Deserialize, Serialize};

use crate::orbital::{compute_prograde, vessel_frame, FrameBasis, OrbitError, Vec3, VesselState};

/// Mission state handed to a pilot at a decision tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// s
    pub time_elapsed: f64,
    /// Pursuer total mass (kg).
    pub vehicle_mass: f64,
    /// Pursuer propellant (kg).
    pub vehicle_propellant: f64,
    pub pursuer_pos: Vec3,
    pub pursuer_vel: Vec3,
    pub evader_pos: Vec3,
    pub evader_vel: Vec3,
    /// Unit relative velocity in the vessel frame; `None` when the vessels
    /// have zero relative velocity or the frame is degenerate.
    pub prograde: Option<Vec3>,
    /// m
    pub range: f64,
    /// d(range)/dt, negative while closing (m/s).
    pub range_rate: f64,
}

impl Observation {
    pub fn from_states(time_elapsed: f64, pursuer: &VesselState, evader: &VesselState) -> Self {
        let (range, range_rate) = range_and_rate(pursuer, evader);
        let prograde = pursuer_frame(pursuer.position, evader.position, pursuer.velocity)
            .ok()
            .and_then(|frame| {
                (pursuer.velocity - evader.velocity)
                    .unit()
                    .map(|rel| frame.to_vessel(rel))
            });
        Self {
            time_elapsed,
            vehicle_mass: pursuer.mass(),
            vehicle_propellant: pursuer.propellant,
            pursuer_pos: pursuer.position,
            pursuer_vel: pursuer.velocity,
            evader_pos: evader.position,
            evader_vel: evader.velocity,
            prograde,
            range,
            range_rate,
        }
    }

    /// Speed at which the vessels approach each other (positive when closing).
    pub fn closing_speed(&self) -> f64 {
        -self.range_rate
    }

    pub fn relative_speed(&self) -> f64 {
        (self.pursuer_vel - self.evader_vel).norm()
    }
}

/// Range and range-rate between two vessels.
pub fn range_and_rate(pursuer: &VesselState, evader: &VesselState) -> (f64, f64) {
    let dp = evader.position - pursuer.position;
    let dv = evader.velocity - pursuer.velocity;
    let range = dp.norm();
    let rate = if range > 0.0 { dp.dot(dv) / range } else { 0.0 };
    (range, rate)
}

/// Vessel frame of the pursuer with "up" taken as its radial-out direction.
///
/// When the target sits straight overhead (or below) the radial direction is
/// parallel to the line of sight; the orbit normal is used instead.
pub fn pursuer_frame(
    pursuer_pos: Vec3,
    evader_pos: Vec3,
    pursuer_vel: Vec3,
) -> Result<FrameBasis, OrbitError> {
    match vessel_frame(pursuer_pos, evader_pos, pursuer_pos) {
        Err(OrbitError::DegenerateFrame(_)) => {
            vessel_frame(pursuer_pos, evader_pos, pursuer_pos.cross(pursuer_vel))
        }
        other => other,
    }
}

/// Prograde with the default radial-out up vector.
pub fn pursuer_prograde(pursuer: &VesselState, evader: &VesselState) -> Result<Vec3, OrbitError> {
    compute_prograde(
        pursuer.position,
        evader.position,
        pursuer.velocity,
        evader.velocity,
        pursuer.position,
    )
}
