use std::path::Path;
use std::process::Command;

use hotstart_cli::config::{Baseline, PipelineConfig, Preset};
use hotstart_cli::stages::{self, Arm};
use hotstart_cli::{CliError, Manifest, Stage};
use hotstart_core::metrics::log_rank;
use hotstart_core::GameType;

fn gt(s: &str) -> GameType {
    s.parse().unwrap()
}

fn small(game_types: &[&str]) -> PipelineConfig {
    let mut c = PipelineConfig::preset(Preset::Smoke);
    c.game_types = game_types.iter().map(|s| gt(s)).collect();
    c.gfs.population_size = 20;
    c.gfs.generations = 5;
    c.train.epochs = 3;
    c.generate.count = 20;
    c.evaluate.batch_size = 20;
    c
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn simulate_writes_one_log_per_episode() {
    let mut cfg = PipelineConfig::preset(Preset::Smoke);
    cfg.simulate.episodes_per_game = 2;
    let dir = tempfile::tempdir().unwrap();
    let m = stages::cmd_simulate(&cfg, dir.path()).unwrap();
    assert_eq!(m.files.len(), 2 * 12);
    for g in &cfg.game_types {
        for i in 0..2 {
            let p = Stage::Simulate.dir(dir.path()).join(format!("{g}/episode_{i:04}.jsonl"));
            assert!(p.is_file(), "{}", p.display());
        }
    }
}

#[test]
fn simulate_rerun_is_byte_identical() {
    let mut cfg = small(&["4x2"]);
    cfg.simulate.episodes_per_game = 1;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    stages::cmd_simulate(&cfg, a.path()).unwrap();
    stages::cmd_simulate(&cfg, b.path()).unwrap();
    let f = "simulate/4x2/episode_0000.jsonl";
    assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)));
    assert_eq!(read(&a.path().join("simulate/manifest.json")), read(&b.path().join("simulate/manifest.json")));
}

#[test]
fn invalid_game_type_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_hotstart"))
        .args(["simulate", "--preset", "smoke", "--game-type", "6x1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("6x1"));
    assert!(!out.exists());

    let mut cfg = small(&["4x2"]);
    cfg.train.learning_rate = -1.0;
    assert!(matches!(stages::cmd_simulate(&cfg, &out), Err(CliError::Config(_))));
    assert!(!out.exists());
}

#[test]
fn stages_require_upstream() {
    let cfg = small(&["4x2"]);
    let dir = tempfile::tempdir().unwrap();
    let err = stages::cmd_train(&cfg, dir.path()).unwrap_err();
    assert!(matches!(err, CliError::MissingUpstream { stage: Stage::Train, upstream: Stage::BuildGfs }));
    assert!(matches!(
        stages::cmd_report(&cfg, dir.path()),
        Err(CliError::MissingUpstream { upstream: Stage::Evaluate, .. })
    ));
}

#[test]
fn tampered_artifact_is_detected() {
    let cfg = small(&["3x2"]);
    let dir = tempfile::tempdir().unwrap();
    stages::cmd_build_gfs(&cfg, dir.path()).unwrap();
    let p = Stage::BuildGfs.dir(dir.path()).join(stages::DATASET_FILE);
    std::fs::write(&p, "[]").unwrap();
    assert!(stages::cmd_train(&cfg, dir.path()).is_err());
}

#[test]
fn full_pipeline_artifacts() {
    let cfg = small(&["3x1", "4x2"]);
    let dir = tempfile::tempdir().unwrap();
    let summary = stages::run_pipeline(&cfg, dir.path()).unwrap();
    assert_eq!(summary.games.len(), 2);

    // every stored front survives the dominance re-check on load
    let fronts = stages::load_fronts(&cfg, dir.path()).unwrap();
    for f in &fronts {
        assert!(!f.members.is_empty());
        assert!(f.is_mutually_nondominated());
    }

    // the hot-start CSV has one row per pursuer per sample
    for g in &cfg.game_types {
        let text = std::fs::read_to_string(Stage::Generate.dir(dir.path()).join(format!("hot_starts_{g}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "game_type,sample_id,pursuer_id,x,y,heading");
        assert_eq!(lines.count(), cfg.generate.count * g.n_pursuers);
        assert_eq!(stages::load_hot_starts(dir.path(), *g).unwrap().len(), cfg.generate.count);
    }

    for stage in [Stage::Simulate, Stage::BuildGfs, Stage::Train, Stage::Generate, Stage::Evaluate, Stage::Report] {
        let m = Manifest::require(dir.path(), stage, stage).unwrap();
        assert_eq!(m.config_hash, cfg.hash());
        m.verify(dir.path()).unwrap();
    }
    let report = Stage::Report.dir(dir.path());
    for f in ["survival_4x2.csv", "log_rank.json", "containment.csv", "summary.json", "heatmap_4x2_hot_start.pgm"] {
        assert!(report.join(f).is_file(), "{f}");
    }
    let survival = std::fs::read_to_string(report.join("survival_4x2.csv")).unwrap();
    assert_eq!(survival.lines().count(), 42);
}

#[test]
fn generate_count_sets_row_total() {
    let mut cfg = small(&["5x2"]);
    cfg.generate.count = 1000;
    let dir = tempfile::tempdir().unwrap();
    stages::cmd_build_gfs(&cfg, dir.path()).unwrap();
    stages::cmd_train(&cfg, dir.path()).unwrap();
    stages::cmd_generate(&cfg, dir.path()).unwrap();
    let text = std::fs::read_to_string(Stage::Generate.dir(dir.path()).join("hot_starts_5x2.csv")).unwrap();
    assert_eq!(text.lines().count() - 1, 1000 * 5);
}

#[test]
fn hot_start_baseline_matches_itself() {
    let mut cfg = small(&["4x2"]);
    cfg.evaluate.baseline = Baseline::HotStart;
    let dir = tempfile::tempdir().unwrap();
    let summary = stages::run_pipeline(&cfg, dir.path()).unwrap();
    let g = &summary.games[0];
    assert!(g.log_rank.p_value > 0.99, "{}", g.log_rank.p_value);
    let hot = stages::load_arm(dir.path(), gt("4x2"), Arm::HotStart).unwrap();
    let base = stages::load_arm(dir.path(), gt("4x2"), Arm::Baseline).unwrap();
    assert_eq!(hot, base);
    assert!(log_rank(&stages::observations(&hot), &stages::observations(&base)).unwrap().p_value > 0.99);
}

#[test]
fn cli_stage_by_stage_matches_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_hotstart");
    let common = [
        "--preset", "smoke", "--game-type", "4x2", "--population", "20", "--generations", "5", "--epochs", "3",
        "--count", "20", "--eval-batch-size", "20",
    ];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for cmd in ["simulate", "build-gfs", "train", "generate", "evaluate", "report"] {
        let s = Command::new(bin).arg(cmd).args(common).arg("--out").arg(&a).output().unwrap().status;
        assert!(s.success(), "{cmd}");
    }
    let s = Command::new(bin).arg("pipeline").args(common).arg("--out").arg(&b).output().unwrap().status;
    assert!(s.success());
    let f = "report/summary.json";
    assert_eq!(read(&a.join(f)), read(&b.join(f)));
}
