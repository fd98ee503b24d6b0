use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{OrbitError, Vec3};

/// Gravitational parameter and radius of the central body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyConstants {
    /// m³/s²
    pub mu: f64,
    /// m
    pub radius: f64,
}

impl BodyConstants {
    /// Kerbin as published by the game.
    pub const KERBIN: BodyConstants = BodyConstants {
        mu: 3.5316e12,
        radius: 600_000.0,
    };

    pub fn validate(&self) -> Result<(), OrbitError> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(OrbitError::InvalidBody("mu must be positive"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(OrbitError::InvalidBody("radius must be positive"));
        }
        Ok(())
    }
}

impl Default for BodyConstants {
    fn default() -> Self {
        Self::KERBIN
    }
}

/// Classical Keplerian elements of an elliptic orbit. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    /// Semi-major axis (m).
    pub a: f64,
    /// Eccentricity.
    pub e: f64,
    /// Inclination.
    pub i: f64,
    /// Argument of periapsis.
    pub omega: f64,
    /// Longitude of the ascending node.
    pub raan: f64,
    /// True anomaly.
    pub nu: f64,
}

impl OrbitalElements {
    pub fn validate(&self) -> Result<(), OrbitError> {
        let all = [self.a, self.e, self.i, self.omega, self.raan, self.nu];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(OrbitError::NonFinite);
        }
        if self.a <= 0.0 {
            return Err(OrbitError::InvalidSemiMajorAxis(self.a));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(OrbitError::NotElliptic(self.e));
        }
        Ok(())
    }

    /// Orbit radius at the current true anomaly.
    pub fn radius(&self) -> f64 {
        self.a * (1.0 - self.e * self.e) / (1.0 + self.e * self.nu.cos())
    }

    pub fn periapsis(&self) -> f64 {
        self.a * (1.0 - self.e)
    }

    pub fn period(&self, body: &BodyConstants) -> f64 {
        TAU * (self.a.powi(3) / body.mu).sqrt()
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Vis-viva speed at radius `r` on an orbit of semi-major axis `a`.
pub fn vis_viva_speed(mu: f64, r: f64, a: f64) -> f64 {
    (mu * (2.0 / r - 1.0 / a)).sqrt()
}

/// Position and velocity in the body frame for the given elements.
pub fn elements_to_state(
    el: &OrbitalElements,
    body: &BodyConstants,
) -> Result<(Vec3, Vec3), OrbitError> {
    el.validate()?;
    body.validate()?;

    let p = el.a * (1.0 - el.e * el.e);
    let (sin_nu, cos_nu) = el.nu.sin_cos();
    let r = p / (1.0 + el.e * cos_nu);

    let r_pf = Vec3::new(r * cos_nu, r * sin_nu, 0.0);
    let k = (body.mu / p).sqrt();
    let v_pf = Vec3::new(-k * sin_nu, k * (el.e + cos_nu), 0.0);

    let (so, co) = el.omega.sin_cos();
    let (sr, cr) = el.raan.sin_cos();
    let (si, ci) = el.i.sin_cos();

    // Columns of the perifocal -> body rotation R3(-raan) R1(-i) R3(-omega)
    let p_hat = Vec3::new(cr * co - sr * so * ci, sr * co + cr * so * ci, so * si);
    let q_hat = Vec3::new(-cr * so - sr * co * ci, -sr * so + cr * co * ci, co * si);

    let position = p_hat * r_pf.x + q_hat * r_pf.y;
    let velocity = p_hat * v_pf.x + q_hat * v_pf.y;
    Ok((position, velocity))
}

// Below these thresholds the node line or periapsis direction is undefined.
const CIRCULAR_TOL: f64 = 1e-11;
const EQUATORIAL_TOL: f64 = 1e-11;

/// Recover Keplerian elements from a position/velocity pair.
///
/// Circular orbits report `omega = 0` with `nu` measured from the node line
/// (or from +X when also equatorial). Equatorial orbits report `raan = 0`.
pub fn state_to_elements(
    position: Vec3,
    velocity: Vec3,
    body: &BodyConstants,
) -> Result<OrbitalElements, OrbitError> {
    body.validate()?;
    if !position.is_finite() || !velocity.is_finite() {
        return Err(OrbitError::NonFinite);
    }
    let mu = body.mu;
    let r = position.norm();
    if r == 0.0 {
        return Err(OrbitError::DegenerateState("zero position vector"));
    }
    let v2 = velocity.norm_squared();
    let h = position.cross(velocity);
    let h_norm = h.norm();
    if h_norm <= 1e-12 * r * velocity.norm() {
        return Err(OrbitError::DegenerateState("zero angular momentum"));
    }

    let energy = v2 / 2.0 - mu / r;
    if energy >= 0.0 {
        return Err(OrbitError::NotElliptic(f64::NAN));
    }
    let a = -mu / (2.0 * energy);

    let e_vec = (position * (v2 - mu / r) - velocity * position.dot(velocity)) / mu;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(OrbitError::NotElliptic(e));
    }

    let h_hat = h / h_norm;
    let i = h_hat.z.clamp(-1.0, 1.0).acos();

    let node = Vec3::Z.cross(h);
    let node_norm = node.norm();
    let equatorial = node_norm <= EQUATORIAL_TOL * h_norm;
    let circular = e <= CIRCULAR_TOL;

    let r_hat = position / r;
    let (raan, omega, nu) = match (equatorial, circular) {
        (false, false) => {
            let n_hat = node / node_norm;
            let e_hat = e_vec / e;
            let raan = n_hat.y.atan2(n_hat.x);
            let omega = n_hat.cross(e_hat).dot(h_hat).atan2(n_hat.dot(e_hat));
            let nu = e_hat.cross(r_hat).dot(h_hat).atan2(e_hat.dot(r_hat));
            (raan, omega, nu)
        }
        (false, true) => {
            let n_hat = node / node_norm;
            let raan = n_hat.y.atan2(n_hat.x);
            let u = n_hat.cross(r_hat).dot(h_hat).atan2(n_hat.dot(r_hat));
            (raan, 0.0, u)
        }
        (true, false) => {
            let e_hat = e_vec / e;
            let omega = Vec3::X.cross(e_hat).dot(h_hat).atan2(Vec3::X.dot(e_hat));
            let nu = e_hat.cross(r_hat).dot(h_hat).atan2(e_hat.dot(r_hat));
            (0.0, omega, nu)
        }
        (true, true) => {
            let l = Vec3::X.cross(r_hat).dot(h_hat).atan2(Vec3::X.dot(r_hat));
            (0.0, 0.0, l)
        }
    };

    Ok(OrbitalElements {
        a,
        e,
        i,
        omega: normalize_angle(omega),
        raan: normalize_angle(raan),
        nu: normalize_angle(nu),
    })
}
