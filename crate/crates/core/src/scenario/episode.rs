use serde::{Deserialize, Serialize};

use super::evader::evader_burn;
use super::observation::{pursuer_frame, range_and_rate};
use super::{
    action_to_throttle, compute_score, Action, EpisodeConfig, Observation, Pilot, PursuerInit,
    ScenarioError,
};
use crate::orbital::{
    elements_to_state, generate_orbit, propagate, Burn, OrbitalElements, Vec3, VesselState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    TimeLimit,
    PropellantExhausted,
    SurfaceImpact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub pos: Vec3,
    pub vel: Vec3,
}

/// One integrator substep of an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub pursuer: Kinematics,
    pub evader: Kinematics,
    pub action: Action,
    pub range: f64,
    pub range_rate: f64,
    pub propellant: f64,
}

/// Summary metrics of a finished (or in-progress) episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub seed: u64,
    /// m
    pub closest_distance: f64,
    /// Relative speed at the closest-approach substep (m/s).
    pub speed_at_closest: f64,
    /// s
    pub time_at_closest: f64,
    /// kg
    pub fuel_used: f64,
    /// s
    pub elapsed: f64,
    pub score: f64,
    pub ticks: u64,
    pub termination: Option<TerminationReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    #[serde(flatten)]
    pub summary: EpisodeSummary,
    pub trajectory: Vec<TrajectoryRecord>,
}

/// Observation after a step plus whether the episode ended.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Closest {
    distance: f64,
    speed: f64,
    time: f64,
}

/// A live pursuer–evader episode.
#[derive(Debug, Clone)]
pub struct Episode {
    config: EpisodeConfig,
    pursuer_orbit: OrbitalElements,
    pursuer: VesselState,
    evader: VesselState,
    tick: u64,
    termination: Option<TerminationReason>,
    closest: Closest,
    initial_propellant: f64,
    observation: Observation,
    trajectory: Vec<TrajectoryRecord>,
}

impl Episode {
    /// Place both vessels and return the episode at t = 0.
    pub fn reset(config: EpisodeConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let pursuer_orbit = match &config.pursuer {
            PursuerInit::Fixed(el) => *el,
            PursuerInit::Generate(constraints) => {
                generate_orbit(&config.evader_orbit, constraints, &config.body, config.seed)?
            }
        };
        let vessel = |el: &OrbitalElements| -> Result<VesselState, ScenarioError> {
            let (position, velocity) = elements_to_state(el, &config.body)?;
            Ok(VesselState {
                position,
                velocity,
                dry_mass: config.vessel.dry_mass,
                propellant: config.vessel.propellant,
                propellant_exhausted: false,
            })
        };
        let pursuer = vessel(&pursuer_orbit)?;
        let evader = vessel(&config.evader_orbit)?;
        let observation = Observation::from_states(0.0, &pursuer, &evader);
        let (range, _) = range_and_rate(&pursuer, &evader);
        let closest = Closest {
            distance: range,
            speed: (pursuer.velocity - evader.velocity).norm(),
            time: 0.0,
        };
        let capacity = (config.max_ticks() * u64::from(config.substeps)) as usize;
        Ok(Self {
            initial_propellant: pursuer.propellant,
            config,
            pursuer_orbit,
            pursuer,
            evader,
            tick: 0,
            termination: None,
            closest,
            observation,
            trajectory: Vec::with_capacity(capacity),
        })
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn pursuer_orbit(&self) -> &OrbitalElements {
        &self.pursuer_orbit
    }

    pub fn pursuer(&self) -> &VesselState {
        &self.pursuer
    }

    pub fn evader(&self) -> &VesselState {
        &self.evader
    }

    pub fn observation(&self) -> &Observation {
        &self.observation
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn is_done(&self) -> bool {
        self.termination.is_some()
    }

    pub fn termination(&self) -> Option<TerminationReason> {
        self.termination
    }

    pub fn trajectory(&self) -> &[TrajectoryRecord] {
        &self.trajectory
    }

    /// Smallest range seen so far, at substep resolution.
    pub fn closest_distance(&self) -> f64 {
        self.closest.distance
    }

    pub fn fuel_used(&self) -> f64 {
        self.initial_propellant - self.pursuer.propellant
    }

    /// Apply `action` for one decision period.
    pub fn step(&mut self, action: &Action) -> Result<StepOutcome, ScenarioError> {
        if self.is_done() {
            return Err(ScenarioError::EpisodeDone);
        }
        let cfg = &self.config;
        let h = cfg.integrator_step();
        let substeps = u64::from(cfg.substeps);

        // Throttle is fixed in the body frame for the whole tick.
        let throttle = action_to_throttle(action);
        let pursuer_burn = match pursuer_frame(
            self.pursuer.position,
            self.evader.position,
            self.pursuer.velocity,
        ) {
            Ok(frame) if throttle != Vec3::ZERO => Burn {
                thrust: frame.to_body(throttle) * cfg.engine.max_thrust,
                mass_flow: cfg.engine.flow_for_throttle(throttle),
            },
            _ => Burn::COAST,
        };

        for j in 0..substeps {
            let offset = j as f64 * h;
            let burn = if offset < action.duration - 1e-12 {
                pursuer_burn
            } else {
                Burn::COAST
            };
            let evade = evader_burn(&self.evader, &self.pursuer, cfg.evader_threshold, &cfg.engine);
            self.pursuer = propagate(&self.pursuer, burn, &cfg.body, h)?;
            self.evader = propagate(&self.evader, evade, &cfg.body, h)?;

            let t = self.tick as f64 * cfg.decision_period + (j + 1) as f64 * h;
            let (range, range_rate) = range_and_rate(&self.pursuer, &self.evader);
            if range < self.closest.distance {
                self.closest = Closest {
                    distance: range,
                    speed: (self.pursuer.velocity - self.evader.velocity).norm(),
                    time: t,
                };
            }
            self.trajectory.push(TrajectoryRecord {
                t,
                pursuer: Kinematics {
                    pos: self.pursuer.position,
                    vel: self.pursuer.velocity,
                },
                evader: Kinematics {
                    pos: self.evader.position,
                    vel: self.evader.velocity,
                },
                action: *action,
                range,
                range_rate,
                propellant: self.pursuer.propellant,
            });
        }

        self.tick += 1;
        let time = self.tick as f64 * cfg.decision_period;
        self.observation = Observation::from_states(time, &self.pursuer, &self.evader);

        let radius = cfg.body.radius;
        self.termination = if self.pursuer.position.norm() <= radius
            || self.evader.position.norm() <= radius
        {
            Some(TerminationReason::SurfaceImpact)
        } else if cfg.stop_on_empty_tank && self.pursuer.propellant_exhausted {
            Some(TerminationReason::PropellantExhausted)
        } else if self.tick >= cfg.max_ticks() {
            Some(TerminationReason::TimeLimit)
        } else {
            None
        };

        Ok(StepOutcome {
            observation: self.observation.clone(),
            done: self.is_done(),
        })
    }

    pub fn summary(&self) -> EpisodeSummary {
        let elapsed = self.observation.time_elapsed;
        let fuel = self.fuel_used().max(0.0);
        let score = compute_score(
            self.closest.distance,
            self.closest.speed,
            fuel,
            elapsed,
            &self.config.score_weights,
        )
        .unwrap_or(f64::NAN);
        EpisodeSummary {
            seed: self.config.seed,
            closest_distance: self.closest.distance,
            speed_at_closest: self.closest.speed,
            time_at_closest: self.closest.time,
            fuel_used: fuel,
            elapsed,
            score,
            ticks: self.tick,
            termination: self.termination,
        }
    }

    pub fn into_result(self) -> EpisodeResult {
        EpisodeResult {
            summary: self.summary(),
            trajectory: self.trajectory,
        }
    }
}

/// Run a full episode with `pilot` choosing every action.
pub fn run_episode<P: Pilot + ?Sized>(
    config: EpisodeConfig,
    pilot: &mut P,
) -> Result<EpisodeResult, ScenarioError> {
    let mut episode = Episode::reset(config)?;
    while !episode.is_done() {
        let action = pilot.act(episode.observation());
        episode.step(&action)?;
    }
    Ok(episode.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{CoastPilot, ForwardThrottle, NaivePilot};

    #[test]
    fn reset_is_deterministic_and_in_band() {
        let a = Episode::reset(EpisodeConfig::with_seed(11)).unwrap();
        let b = Episode::reset(EpisodeConfig::with_seed(11)).unwrap();
        assert_eq!(a.observation(), b.observation());
        let r = a.observation().range;
        assert!((700.0..=3000.0).contains(&r), "range {r}");
        assert_eq!(a.observation().time_elapsed, 0.0);
        assert_eq!(a.observation().prograde.is_some(), a.observation().relative_speed() > 0.0);
    }

    #[test]
    fn time_advances_one_period_per_step() {
        let mut ep = Episode::reset(EpisodeConfig::with_seed(1)).unwrap();
        for k in 1..=4 {
            let out = ep.step(&Action::NONE).unwrap();
            assert_eq!(out.observation.time_elapsed, 0.5 * k as f64);
        }
        assert_eq!(ep.trajectory().len(), 20);
    }

    #[test]
    fn step_after_done_errors() {
        let mut cfg = EpisodeConfig::with_seed(2);
        cfg.max_duration = 1.0;
        let mut ep = Episode::reset(cfg).unwrap();
        assert!(!ep.step(&Action::NONE).unwrap().done);
        assert!(ep.step(&Action::NONE).unwrap().done);
        assert_eq!(ep.termination(), Some(TerminationReason::TimeLimit));
        assert!(matches!(ep.step(&Action::NONE), Err(ScenarioError::EpisodeDone)));
    }

    #[test]
    fn coast_episode_uses_no_fuel() {
        let mut cfg = EpisodeConfig::with_seed(5);
        cfg.max_duration = 20.0;
        let r = run_episode(cfg, &mut CoastPilot).unwrap();
        assert_eq!(r.summary.fuel_used, 0.0);
        assert_eq!(r.summary.ticks, 40);
    }

    #[test]
    fn forward_tick_adds_impulse_along_line_of_sight() {
        let cfg = EpisodeConfig::with_seed(9);
        let mut burn = Episode::reset(cfg.clone()).unwrap();
        let mut coast = Episode::reset(cfg).unwrap();
        let e_f = (burn.evader().position - burn.pursuer().position).unit().unwrap();
        let m0 = burn.pursuer().mass();
        burn.step(&Action::forward()).unwrap();
        coast.step(&Action::NONE).unwrap();
        let dv = burn.pursuer().velocity - coast.pursuer().velocity;
        let expected = 8000.0 / m0 * 0.5;
        let along = dv.dot(e_f);
        assert!((along - expected).abs() / expected < 5e-3, "{along} vs {expected}");
        assert!((burn.fuel_used() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn running_dry_ends_episode() {
        let mut cfg = EpisodeConfig::with_seed(4);
        cfg.vessel.propellant = 2.0;
        let mut pilot = NaivePilot;
        let r = run_episode(cfg, &mut pilot).unwrap();
        assert_eq!(r.summary.termination, Some(TerminationReason::PropellantExhausted));
        assert_eq!(r.summary.fuel_used, 2.0);
        assert_eq!(r.summary.ticks, 4);
    }

    #[test]
    fn short_duration_burns_part_of_tick() {
        let cfg = EpisodeConfig::with_seed(9);
        let mut ep = Episode::reset(cfg).unwrap();
        let mut a = Action::forward();
        a.duration = 0.2;
        ep.step(&a).unwrap();
        assert!((ep.fuel_used() - 0.2).abs() < 1e-12);
        assert_eq!(a.ft, ForwardThrottle::Forward);
    }
}
