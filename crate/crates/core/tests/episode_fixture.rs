use hotstart_core::controllers::default_policies;
use hotstart_core::sim::{run_episode, AgentState, Configuration, EpisodeLog, GameType, Scenario};

fn play(gt: GameType, pursuers: &[(f64, f64)], evaders: &[(f64, f64)], seed: u64) -> EpisodeLog {
    let sc = Scenario::for_game_type(gt);
    let config = Configuration::new(
        pursuers.iter().map(|&(x, y)| AgentState::at(x, y)).collect(),
        sc.capture_radius,
        gt,
    )
    .unwrap();
    let ev: Vec<AgentState> = evaders.iter().map(|&(x, y)| AgentState::at(x, y)).collect();
    let (mut p, mut e) = default_policies(sc.kind());
    run_episode(&sc, p.as_mut(), e.as_mut(), &config, &ev, seed).unwrap()
}

fn final_positions(log: &EpisodeLog) -> Vec<(f64, f64)> {
    log.steps.last().unwrap().pursuers.iter().map(|p| (p.position.x, p.position.y)).collect()
}

fn assert_close(got: &[(f64, f64)], want: &[(f64, f64)]) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g.0 - w.0).abs() < 1e-9 && (g.1 - w.1).abs() < 1e-9, "{got:?} vs {want:?}");
    }
}

/// Two pursuers flank an evader near a corner. With the evader twice as fast
/// the interception aim point lies behind each pursuer, so the evader is
/// never caught; the pinned run records that outcome.
#[test]
fn flanked_corner_evader_fixture() {
    let log = play(GameType::new(2, 1).unwrap(), &[(0.2, 0.9), (0.9, 0.2)], &[(0.85, 0.85)], 2024);
    eprintln!("2x1 outcome {:?} final {:?}", log.survival_observations(), final_positions(&log));
    assert_eq!(log.survival_observations(), vec![(40, false)]);
    assert_close(&final_positions(&log), &FLANK_FINAL);
}

#[test]
fn four_vs_two_fixture() {
    let log = play(
        GameType::new(4, 2).unwrap(),
        &[(-0.7, -0.7), (0.7, -0.7), (-0.7, 0.7), (0.7, 0.7)],
        &[(0.1, 0.2), (-0.3, -0.4)],
        7,
    );
    eprintln!("4x2 outcome {:?} final {:?}", log.survival_observations(), final_positions(&log));
    assert_eq!(log.survival_observations(), FOUR_TWO_OBS);
    assert_close(&final_positions(&log), &FOUR_TWO_FINAL);
}

const FLANK_FINAL: [(f64, f64); 2] = [(-0.7877778973799661, 0.7476533520828753), (0.7476533520828753, -0.7877778973799661)];
const FOUR_TWO_OBS: [(usize, bool); 2] = [(18, true), (16, true)];
const FOUR_TWO_FINAL: [(f64, f64); 4] = [
    (-0.02245368723865847, -0.11883830624502967),
    (0.06415770235426804, -0.14797095311123892),
    (-0.06783097068013957, 0.07468396910221367),
    (0.0783145532909835, 0.0554522709433202),
];
