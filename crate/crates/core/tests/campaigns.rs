use rendezvous_core::agent::AgentConfig;
use rendezvous_core::eval::{export_trajectories, run_campaign, AgentSpec, Aggregates};
use rendezvous_core::navball::NavballParams;
use rendezvous_core::scenario::EpisodeConfig;

#[test]
fn oracle_and_navball_campaigns_match() {
    let cfg = EpisodeConfig::default();
    let seeds = [10, 11, 12];
    let nav = run_campaign(&AgentSpec::Navball { params: NavballParams::default() }, &cfg, &seeds).unwrap();
    let oracle = run_campaign(
        &AgentSpec::Oracle { config: AgentConfig::default(), params: NavballParams::default() },
        &cfg,
        &seeds,
    )
    .unwrap();
    let d = |c: &rendezvous_core::eval::Campaign| c.report.episodes.iter().map(|r| r.summary.closest_distance).collect::<Vec<_>>();
    assert_eq!(d(&nav), d(&oracle));
    assert_eq!(oracle.report.aggregates.failure_rate, 0.0);
    assert_eq!(oracle.report.aggregates.attempts, 3 * 480);
    assert_eq!(oracle.report.aggregates.latency.unwrap().count, 3 * 480);
}

#[test]
fn aggregates_are_recomputable_from_rows() {
    let c = run_campaign(&AgentSpec::Naive, &EpisodeConfig::default(), &[1, 2, 3, 4]).unwrap();
    let json = serde_json::to_string(&c.report).unwrap();
    let back: rendezvous_core::eval::CampaignReport = serde_json::from_str(&json).unwrap();
    assert_eq!(Aggregates::from_rows(&back.episodes).unwrap(), back.aggregates);
    assert!(back.aggregates.best_distance <= back.aggregates.avg_distance);
    assert!(back.aggregates.latency.is_none());
}

#[test]
fn trajectories_are_written_per_seed() {
    let cfg = EpisodeConfig { max_duration: 10.0, ..EpisodeConfig::default() };
    let c = run_campaign(&AgentSpec::Naive, &cfg, &[7, 8]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_trajectories(&c.results, dir.path()).unwrap();
    for seed in [7, 8] {
        assert!(dir.path().join(format!("episode_{seed}.ndjson")).exists());
        assert!(dir.path().join(format!("relative_{seed}.csv")).exists());
    }
}
