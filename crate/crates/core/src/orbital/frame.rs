use serde::{Deserialize, Serialize};

use super::{OrbitError, Vec3};

// Cross-product magnitude (of unit vectors) below which "up" is treated as
// parallel to the line of sight.
const PARALLEL_TOL: f64 = 1e-9;

/// Orthonormal vessel frame expressed in body-frame coordinates:
/// x = right, y = forward (toward target), z = up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBasis {
    pub e_r: Vec3,
    pub e_f: Vec3,
    pub e_u: Vec3,
}

impl FrameBasis {
    /// Vessel-frame vector to body frame (R·v).
    pub fn to_body(&self, v: Vec3) -> Vec3 {
        self.e_r * v.x + self.e_f * v.y + self.e_u * v.z
    }

    /// Body-frame vector to vessel frame (Rᵀ·v).
    pub fn to_vessel(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.e_r.x * v.x + self.e_r.y * v.y + self.e_r.z * v.z,
            self.e_f.x * v.x + self.e_f.y * v.y + self.e_f.z * v.z,
            self.e_u.x * v.x + self.e_u.y * v.y + self.e_u.z * v.z,
        )
    }

    /// Rows of R = [e_r e_f e_u] (basis vectors as columns).
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.e_r.x, self.e_f.x, self.e_u.x],
            [self.e_r.y, self.e_f.y, self.e_u.y],
            [self.e_r.z, self.e_f.z, self.e_u.z],
        ]
    }

    /// ‖RᵀR − I‖∞ (max absolute entry).
    pub fn orthonormality_error(&self) -> f64 {
        let cols = [self.e_r, self.e_f, self.e_u];
        let mut worst: f64 = 0.0;
        for (i, a) in cols.iter().enumerate() {
            for (j, b) in cols.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(*b) - target).abs());
            }
        }
        worst
    }
}

/// Build the vessel frame: forward toward the evader, up from `vessel_up`
/// orthogonalized against forward, right = forward × up.
pub fn vessel_frame(
    pursuer_pos: Vec3,
    evader_pos: Vec3,
    vessel_up: Vec3,
) -> Result<FrameBasis, OrbitError> {
    let e_f = (evader_pos - pursuer_pos)
        .unit()
        .ok_or(OrbitError::DegenerateFrame("pursuer and evader coincide"))?;
    let up = vessel_up
        .unit()
        .ok_or(OrbitError::DegenerateFrame("zero up vector"))?;
    if up.cross(e_f).norm() < PARALLEL_TOL {
        return Err(OrbitError::DegenerateFrame("up is parallel to the line of sight"));
    }
    let along = up.dot(e_f);
    let e_u = if along == 0.0 {
        up
    } else {
        (up - e_f * along)
            .unit()
            .ok_or(OrbitError::DegenerateFrame("up is parallel to the line of sight"))?
    };
    let e_r = e_f.cross(e_u);
    Ok(FrameBasis { e_r, e_f, e_u })
}

/// Direction of the pursuer's velocity relative to the evader, in the vessel
/// frame: p = Rᵀ · unit(v_p − v_e).
pub fn compute_prograde(
    pursuer_pos: Vec3,
    evader_pos: Vec3,
    pursuer_vel: Vec3,
    evader_vel: Vec3,
    vessel_up: Vec3,
) -> Result<Vec3, OrbitError> {
    let rel = (pursuer_vel - evader_vel)
        .unit()
        .ok_or(OrbitError::ZeroRelativeVelocity)?;
    let frame = vessel_frame(pursuer_pos, evader_pos, vessel_up)?;
    Ok(frame.to_vessel(rel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_frame() {
        let f = vessel_frame(Vec3::ZERO, Vec3::new(5.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(f.e_f, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(f.e_u, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(f.e_r, Vec3::new(0.0, -1.0, 0.0));
    }

    #[test]
    fn orthogonal_up_is_only_normalized() {
        let up = Vec3::new(0.0, 3.0, 4.0);
        let f = vessel_frame(Vec3::new(1.0, 1.0, 1.0), Vec3::new(9.0, 1.0, 1.0), up).unwrap();
        assert_eq!(f.e_u, up.unit().unwrap());
    }

    #[test]
    fn parallel_up_is_degenerate() {
        let err = vessel_frame(Vec3::ZERO, Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, 1.0));
        assert!(matches!(err, Err(OrbitError::DegenerateFrame(_))));
        let err = vessel_frame(Vec3::ZERO, Vec3::ZERO, Vec3::Z);
        assert!(matches!(err, Err(OrbitError::DegenerateFrame(_))));
    }

    #[test]
    fn pure_closing_is_plus_y() {
        let pp = Vec3::new(700_000.0, 0.0, 0.0);
        let pe = Vec3::new(700_000.0, 1000.0, 0.0);
        let ve = Vec3::new(0.0, 2000.0, 0.0);
        let vp = ve + Vec3::new(0.0, 7.0, 0.0);
        let p = compute_prograde(pp, pe, vp, ve, pp).unwrap();
        assert!((p - Vec3::Y).max_abs() < 1e-15, "{p:?}");
    }

    #[test]
    fn zero_relative_velocity_is_an_error() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        let r = compute_prograde(Vec3::X, Vec3::Y * 10.0, v, v, Vec3::Z);
        assert!(matches!(r, Err(OrbitError::ZeroRelativeVelocity)));
    }
}
