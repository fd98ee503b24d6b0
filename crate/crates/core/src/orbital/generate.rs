use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{elements_to_state, normalize_angle, BodyConstants, OrbitError, OrbitalElements};

pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// Sampling ranges for pursuer orbit generation. All ranges inclusive `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitConstraints {
    pub eccentricity: (f64, f64),
    /// Absolute inclination (rad).
    pub inclination: (f64, f64),
    /// Requested initial pursuer–evader distance (m); also the acceptance band
    /// for the realized separation.
    pub distance: (f64, f64),
    /// Radial offset as a fraction of the sampled distance.
    pub radial_fraction: (f64, f64),
}

impl Default for OrbitConstraints {
    fn default() -> Self {
        Self::around(&crate::scenario::default_evader_orbit())
    }
}

impl OrbitConstraints {
    /// Default band centred on the evader's inclination.
    pub fn around(evader: &OrbitalElements) -> Self {
        Self {
            eccentricity: (0.0, 0.005),
            inclination: ((evader.i - 0.004).max(0.0), evader.i + 0.004),
            distance: (700.0, 3000.0),
            radial_fraction: (0.1, 0.5),
        }
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(self.eccentricity) || self.eccentricity.0 < 0.0 || self.eccentricity.1 >= 1.0 {
            return Err(OrbitError::InvalidConstraints("eccentricity must lie in [0, 1)"));
        }
        if !ok(self.inclination) || self.inclination.0 < 0.0 || self.inclination.1 > PI {
            return Err(OrbitError::InvalidConstraints("inclination must lie in [0, π]"));
        }
        if !ok(self.distance) || self.distance.0 <= 0.0 || self.distance.0 >= self.distance.1 {
            return Err(OrbitError::InvalidConstraints(
                "distance range must satisfy 0 < min < max",
            ));
        }
        if !ok(self.radial_fraction) || self.radial_fraction.0 < 0.0 {
            return Err(OrbitError::InvalidConstraints("radial fraction range"));
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Seeded stream of pursuer orbits relative to a fixed evader orbit.
pub struct OrbitGenerator {
    rng: ChaCha8Rng,
}

impl OrbitGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Draw candidates until one lands inside the distance band.
    ///
    /// Each candidate starts at periapsis (ν = 0) at the evader's radius plus
    /// a radial offset, shares the evader's node, and has its periapsis at the
    /// evader's current argument of latitude.
    pub fn next_orbit(
        &mut self,
        evader: &OrbitalElements,
        constraints: &OrbitConstraints,
        body: &BodyConstants,
    ) -> Result<OrbitalElements, OrbitError> {
        constraints.validate()?;
        let (evader_pos, _) = elements_to_state(evader, body)?;
        let evader_radius = evader_pos.norm();

        for _ in 0..MAX_GENERATION_ATTEMPTS {
            let e = sample(&mut self.rng, constraints.eccentricity);
            let i = sample(&mut self.rng, constraints.inclination);
            let distance = sample(&mut self.rng, constraints.distance);
            let fraction = sample(&mut self.rng, constraints.radial_fraction);

            let periapsis = evader_radius + fraction * distance;
            let a = periapsis / (1.0 - e);
            let candidate = OrbitalElements {
                a,
                e,
                i,
                omega: normalize_angle(evader.omega + evader.nu),
                raan: evader.raan,
                nu: 0.0,
            };
            if candidate.periapsis() <= body.radius {
                continue;
            }
            let (pos, _) = elements_to_state(&candidate, body)?;
            let separation = (pos - evader_pos).norm();
            if separation >= constraints.distance.0 && separation <= constraints.distance.1 {
                return Ok(candidate);
            }
        }
        Err(OrbitError::GenerationExhausted(MAX_GENERATION_ATTEMPTS))
    }
}

/// One pursuer orbit from a fresh generator seeded with `seed`.
pub fn generate_orbit(
    evader: &OrbitalElements,
    constraints: &OrbitConstraints,
    body: &BodyConstants,
    seed: u64,
) -> Result<OrbitalElements, OrbitError> {
    OrbitGenerator::new(seed).next_orbit(evader, constraints, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::default_evader_orbit;

    #[test]
    fn accepted_orbits_start_at_periapsis_inside_band() {
        let body = BodyConstants::KERBIN;
        let evader = default_evader_orbit();
        let constraints = OrbitConstraints::around(&evader);
        let (ep, _) = elements_to_state(&evader, &body).unwrap();
        let mut generator = OrbitGenerator::new(3);
        for _ in 0..100 {
            let el = generator.next_orbit(&evader, &constraints, &body).unwrap();
            assert_eq!(el.nu, 0.0);
            let (pp, _) = elements_to_state(&el, &body).unwrap();
            let d = (pp - ep).norm();
            assert!((700.0..=3000.0).contains(&d), "separation {d}");
        }
    }

    #[test]
    fn same_seed_same_orbit() {
        let body = BodyConstants::KERBIN;
        let evader = default_evader_orbit();
        let c = OrbitConstraints::around(&evader);
        let a = generate_orbit(&evader, &c, &body, 42).unwrap();
        let b = generate_orbit(&evader, &c, &body, 42).unwrap();
        assert_eq!(a.a.to_bits(), b.a.to_bits());
        assert_eq!(a, b);
        assert_ne!(a, generate_orbit(&evader, &c, &body, 43).unwrap());
    }

    #[test]
    fn impossible_band_exhausts() {
        let body = BodyConstants::KERBIN;
        let evader = default_evader_orbit();
        let mut c = OrbitConstraints::around(&evader);
        c.inclination = (evader.i, evader.i);
        c.radial_fraction = (0.1, 0.1);
        // Radial-only separation is 0.1·distance, never inside the band.
        assert!(matches!(
            generate_orbit(&evader, &c, &body, 1),
            Err(OrbitError::GenerationExhausted(_))
        ));
    }

    #[test]
    fn invalid_constraints_rejected() {
        let evader = default_evader_orbit();
        let mut c = OrbitConstraints::around(&evader);
        c.distance = (3000.0, 700.0);
        assert!(generate_orbit(&evader, &c, &BodyConstants::KERBIN, 0).is_err());
        let mut c = OrbitConstraints::around(&evader);
        c.eccentricity = (0.0, 1.0);
        assert!(generate_orbit(&evader, &c, &BodyConstants::KERBIN, 0).is_err());
    }
}
