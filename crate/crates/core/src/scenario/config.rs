use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::orbital::{BodyConstants, EngineParams, OrbitConstraints, OrbitalElements};

pub const SCENARIO_ID: &str = "pursuer-evader-e3";

/// The evader's fixed reference orbit: circular, 150 km above Kerbin.
pub fn default_evader_orbit() -> OrbitalElements {
    OrbitalElements {
        a: 750_000.0,
        e: 0.0,
        i: 0.1,
        omega: 0.0,
        raan: 0.0,
        nu: FRAC_PI_2,
    }
}

/// Mass budget of one vessel. Pursuer and evader share these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VesselParams {
    /// kg
    pub dry_mass: f64,
    /// kg
    pub propellant: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        Self {
            dry_mass: 4000.0,
            propellant: 1000.0,
        }
    }
}

/// Scale and exponent of one score term: `(scale * value)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreTerm {
    pub scale: f64,
    pub exponent: f64,
}

impl ScoreTerm {
    pub const fn new(scale: f64, exponent: f64) -> Self {
        Self { scale, exponent }
    }

    pub fn eval(&self, value: f64) -> f64 {
        (self.scale * value).powf(self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreWeights {
    pub distance: ScoreTerm,
    pub velocity: ScoreTerm,
    pub fuel: ScoreTerm,
    pub time: ScoreTerm,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            distance: ScoreTerm::new(0.1, 2.0),
            velocity: ScoreTerm::new(0.5, 1.5),
            fuel: ScoreTerm::new(0.1, 1.25),
            time: ScoreTerm::new(0.01, 1.0),
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        for term in [self.distance, self.velocity, self.fuel, self.time] {
            if !(term.scale > 0.0 && term.exponent > 0.0) {
                return Err(ScenarioError::InvalidConfig(
                    "score scales and exponents must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How the pursuer's initial orbit is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PursuerInit {
    /// Draw from the orbit generator with the episode seed.
    Generate(OrbitConstraints),
    Fixed(OrbitalElements),
}

impl Default for PursuerInit {
    fn default() -> Self {
        PursuerInit::Generate(OrbitConstraints::around(&default_evader_orbit()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    pub scenario_id: String,
    pub seed: u64,
    /// s
    pub max_duration: f64,
    /// s
    pub decision_period: f64,
    /// Integrator steps per decision tick.
    pub substeps: u32,
    /// Evader escape trigger range (m).
    pub evader_threshold: f64,
    pub evader_orbit: OrbitalElements,
    pub pursuer: PursuerInit,
    pub body: BodyConstants,
    pub engine: EngineParams,
    pub vessel: VesselParams,
    pub score_weights: ScoreWeights,
    /// End the episode when the pursuer runs out of propellant.
    pub stop_on_empty_tank: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            scenario_id: SCENARIO_ID.to_string(),
            seed: 0,
            max_duration: 240.0,
            decision_period: 0.5,
            substeps: 5,
            evader_threshold: 400.0,
            evader_orbit: default_evader_orbit(),
            pursuer: PursuerInit::default(),
            body: BodyConstants::KERBIN,
            engine: EngineParams::default(),
            vessel: VesselParams::default(),
            score_weights: ScoreWeights::default(),
            stop_on_empty_tank: true,
        }
    }
}

impl EpisodeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn integrator_step(&self) -> f64 {
        self.decision_period / f64::from(self.substeps)
    }

    /// Number of decision ticks before the time limit.
    pub fn max_ticks(&self) -> u64 {
        (self.max_duration / self.decision_period - 1e-9).ceil().max(0.0) as u64
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |m: &str| Err(ScenarioError::InvalidConfig(m.to_string()));
        if self.scenario_id != SCENARIO_ID {
            return invalid("unsupported scenario id");
        }
        if !(self.max_duration > 0.0 && self.max_duration.is_finite()) {
            return invalid("max_duration must be positive");
        }
        if !(self.decision_period > 0.0 && self.decision_period.is_finite()) {
            return invalid("decision_period must be positive");
        }
        if self.substeps == 0 {
            return invalid("substeps must be at least 1");
        }
        if !(self.evader_threshold > 0.0 && self.evader_threshold.is_finite()) {
            return invalid("evader_threshold must be positive");
        }
        if !(self.vessel.dry_mass > 0.0 && self.vessel.propellant >= 0.0) {
            return invalid("vessel masses must be positive");
        }
        self.body.validate()?;
        self.engine.validate()?;
        self.evader_orbit.validate()?;
        match &self.pursuer {
            PursuerInit::Generate(c) => c.validate()?,
            PursuerInit::Fixed(el) => el.validate()?,
        }
        self.score_weights.validate()
    }
}
