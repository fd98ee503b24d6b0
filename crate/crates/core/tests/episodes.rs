use rendezvous_core::dataset::{record_episode, replay};
use rendezvous_core::navball::{NavballParams, NavballPilot};
use rendezvous_core::scenario::{
    run_episode, Action, Episode, EpisodeConfig, ForwardThrottle, NaivePilot, Pilot,
    TerminationReason,
};

#[test]
fn same_seed_same_result() {
    let a = run_episode(EpisodeConfig::with_seed(21), &mut NavballPilot::default()).unwrap();
    let b = run_episode(EpisodeConfig::with_seed(21), &mut NavballPilot::default()).unwrap();
    assert_eq!(a, b);
    let c = run_episode(EpisodeConfig::with_seed(22), &mut NavballPilot::default()).unwrap();
    assert_ne!(a.summary.closest_distance, c.summary.closest_distance);
}

#[test]
fn replaying_a_log_reproduces_the_trajectory() {
    let cfg = EpisodeConfig::with_seed(31);
    let log = record_episode(&cfg, &mut NavballPilot::default(), serde_json::to_value(NavballParams::default()).unwrap()).unwrap();
    let direct = run_episode(cfg.clone(), &mut NavballPilot::default()).unwrap();
    let replayed = replay(&log, &cfg).unwrap();
    assert_eq!(direct, replayed);
}

#[test]
fn closest_approach_is_the_trajectory_minimum() {
    let r = run_episode(EpisodeConfig::with_seed(5), &mut NaivePilot).unwrap();
    let min = r.trajectory.iter().map(|t| t.range).fold(f64::INFINITY, f64::min);
    let start = Episode::reset(EpisodeConfig::with_seed(5)).unwrap().observation().range;
    assert_eq!(r.summary.closest_distance, min.min(start));
    let at = r.trajectory.iter().find(|t| t.range == r.summary.closest_distance).unwrap();
    assert_eq!(at.t, r.summary.time_at_closest);
}

#[test]
fn fuel_matches_flow_times_burn_time() {
    // One axis group for 10 ticks, then three for 10 ticks.
    let mut ep = Episode::reset(EpisodeConfig::with_seed(3)).unwrap();
    for _ in 0..10 {
        ep.step(&Action::forward()).unwrap();
    }
    let all = Action::all().find(|a| a.ft == ForwardThrottle::Forward && !a.is_none() && a.class_index() == 26).unwrap();
    for _ in 0..10 {
        ep.step(&all).unwrap();
    }
    assert!((ep.fuel_used() - (10.0 * 0.5 + 10.0 * 1.5)).abs() < 1e-9);
}

#[test]
fn observation_times_follow_the_decision_grid() {
    let mut ep = Episode::reset(EpisodeConfig::with_seed(8)).unwrap();
    let mut pilot = NavballPilot::default();
    let mut k = 0u64;
    while !ep.is_done() {
        assert_eq!(ep.observation().time_elapsed, k as f64 * 0.5);
        let a = pilot.act(ep.observation());
        ep.step(&a).unwrap();
        k += 1;
    }
    assert_eq!(k, 480);
    assert_eq!(ep.termination(), Some(TerminationReason::TimeLimit));
}

#[test]
fn invalid_config_is_rejected() {
    let cfg = EpisodeConfig { decision_period: 0.0, ..EpisodeConfig::default() };
    assert!(Episode::reset(cfg).is_err());
    let cfg = EpisodeConfig { substeps: 0, ..EpisodeConfig::default() };
    assert!(Episode::reset(cfg).is_err());
}
