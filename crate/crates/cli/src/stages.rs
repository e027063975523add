//! The six pipeline stages. Each reads only upstream artifacts under the
//! output directory and finishes by writing its manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use hotstart_core::controllers::default_policies;
use hotstart_core::gcn::{
    default_targets, generate_hot_starts, pursuer_config, train, write_hot_starts_csv, GcnModel, TrainConfig,
    TrainReport,
};
use hotstart_core::gfs::{
    aggregate_features, build_graph, default_evader_samples, nsga2_optimize, per_pursuer_features, ConfigGraph,
    ParetoFront,
};
use hotstart_core::metrics::{
    containment, kaplan_meier, log_rank, Heatmap, IndicatorReport, LogRank, Observation,
};
use hotstart_core::sim::{run_episode, AgentState, Configuration, EpisodeLog, GameType, Scenario};
use hotstart_core::Vec2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Baseline, PipelineConfig};
use crate::manifest::{Manifest, Stage};
use crate::seeds::derive;
use crate::CliError;

const HV_REFERENCE: [f64; 3] = [1.0, 1.0, 1.0];
/// Rejection-sampling attempts before giving up on an evader placement.
const MAX_PLACEMENT_TRIES: usize = 10_000;

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
    write_file(path, (text + "\n").as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::io(path, e))?;
    write_file(path, &buf)
}

/// Uniform pursuer placement at rest.
pub fn uniform_configuration<R: Rng + ?Sized>(game_type: GameType, rng: &mut R) -> Configuration {
    let sc = Scenario::for_game_type(game_type);
    Configuration {
        pursuers: (0..game_type.n_pursuers)
            .map(|_| AgentState::at(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect(),
        capture_radius: sc.capture_radius,
        game_type,
    }
}

/// Uniform evader placement, redrawn until every evader is farther than the
/// capture radius from every pursuer in `avoid`.
pub fn sample_evaders<R: Rng + ?Sized>(
    game_type: GameType,
    avoid: &[&Configuration],
    rng: &mut R,
) -> Result<Vec<AgentState>, CliError> {
    let rho = Scenario::for_game_type(game_type).capture_radius;
    for _ in 0..MAX_PLACEMENT_TRIES {
        let es: Vec<Vec2> = (0..game_type.n_evaders)
            .map(|_| Vec2::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect();
        let clear = es.iter().all(|e| {
            avoid
                .iter()
                .flat_map(|c| c.pursuers.iter())
                .all(|p| p.position.distance(*e) > rho)
        });
        if clear {
            return Ok(es.into_iter().map(|p| AgentState::new(p, Vec2::ZERO)).collect());
        }
    }
    Err(CliError::Format(format!("could not place evaders for {game_type}")))
}

fn play(config: &Configuration, evaders: &[AgentState], seed: u64) -> Result<EpisodeLog, CliError> {
    let sc = Scenario::for_game_type(config.game_type);
    let (mut p, mut e) = default_policies(sc.kind());
    Ok(run_episode(&sc, p.as_mut(), e.as_mut(), config, evaders, seed)?)
}

fn prepare(cfg: &PipelineConfig, out: &Path, stage: Stage) -> Result<std::path::PathBuf, CliError> {
    cfg.validate()?;
    let dir = stage.dir(out);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

/// Episodes under the control laws from uniform random starts.
pub fn cmd_simulate(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, CliError> {
    let dir = prepare(cfg, out, Stage::Simulate)?;
    let jobs: Vec<(GameType, usize)> = cfg
        .game_types
        .iter()
        .flat_map(|gt| (0..cfg.simulate.episodes_per_game).map(move |i| (*gt, i)))
        .collect();
    let logs: Vec<(String, EpisodeLog)> = jobs
        .par_iter()
        .map(|&(gt, i)| {
            let seed = derive(cfg.seed, &format!("simulate/{gt}"), i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let config = uniform_configuration(gt, &mut rng);
            let evaders = sample_evaders(gt, &[&config], &mut rng)?;
            Ok((format!("{gt}/episode_{i:04}.jsonl"), play(&config, &evaders, seed)?))
        })
        .collect::<Result<_, CliError>>()?;
    let mut files = Vec::with_capacity(logs.len());
    for (name, log) in &logs {
        let path = dir.join(name);
        write_with(&path, |w| {
            log.write_jsonl(w).map_err(|e| std::io::Error::other(e.to_string()))
        })?;
        files.push(name.clone());
    }
    Manifest::write(out, Stage::Simulate, cfg.seed, &cfg.hash(), files)
}

fn front_file(gt: GameType) -> String {
    format!("front_{gt}.json")
}

pub const DATASET_FILE: &str = "dataset.json";

/// NSGA-II fronts per game type and the stacked graph dataset.
pub fn cmd_build_gfs(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, CliError> {
    let dir = prepare(cfg, out, Stage::BuildGfs)?;
    let mut files = Vec::new();
    let mut dataset: Vec<ConfigGraph> = Vec::new();
    for gt in &cfg.game_types {
        let samples = default_evader_samples(*gt);
        let front = nsga2_optimize(*gt, &samples, &cfg.gfs, derive(cfg.seed, &format!("gfs/{gt}"), 0))?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive(cfg.seed, &format!("gfs-noise/{gt}"), 0));
        for m in &front.members {
            let feats = per_pursuer_features(&m.config, &samples)?;
            dataset.push(build_graph(&m.config, &feats, &mut rng)?);
        }
        write_file(&dir.join(front_file(*gt)), (front.to_json()? + "\n").as_bytes())?;
        let csv = format!("front_{gt}.csv");
        write_with(&dir.join(&csv), |w| front.write_csv(w))?;
        files.push(front_file(*gt));
        files.push(csv);
    }
    write_json(&dir.join(DATASET_FILE), &dataset)?;
    files.push(DATASET_FILE.into());
    Manifest::write(out, Stage::BuildGfs, cfg.seed, &cfg.hash(), files)
}

/// Fronts for every configured game type, re-checked for dominance.
pub fn load_fronts(cfg: &PipelineConfig, out: &Path) -> Result<Vec<ParetoFront>, CliError> {
    let dir = Stage::BuildGfs.dir(out);
    cfg.game_types
        .iter()
        .map(|gt| {
            let path = dir.join(front_file(*gt));
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            Ok(ParetoFront::from_json(&text)?)
        })
        .collect()
}

pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_REPORT_FILE: &str = "report.json";

fn effective_train_config(cfg: &PipelineConfig) -> TrainConfig {
    TrainConfig {
        seed: derive(cfg.seed, "train", cfg.train.seed),
        ..cfg.train.clone()
    }
}

/// Train the GCN on the stacked dataset.
pub fn cmd_train(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, CliError> {
    Manifest::require(out, Stage::BuildGfs, Stage::Train)?.verify(out)?;
    let dir = prepare(cfg, out, Stage::Train)?;
    let fronts = load_fronts(cfg, out)?;
    let graphs: Vec<ConfigGraph> = read_json(&Stage::BuildGfs.dir(out).join(DATASET_FILE))?;
    let targets = default_targets(&fronts);
    let (model, report) = train(&graphs, &targets, &effective_train_config(cfg))?;
    write_file(&dir.join(MODEL_FILE), (model.to_json()? + "\n").as_bytes())?;
    write_json(&dir.join(TRAIN_REPORT_FILE), &report)?;
    write_with(&dir.join("loss_trace.csv"), |w| {
        use std::io::Write;
        writeln!(w, "epoch,loss,gd,gd_plus,igd,igd_plus,hypervolume")?;
        for m in &report.metrics {
            let i = &m.indicators;
            writeln!(w, "{},{},{},{},{},{},{}", m.epoch, m.loss, i.gd, i.gd_plus, i.igd, i.igd_plus, i.hypervolume)?;
        }
        Ok(())
    })?;
    let files = vec![MODEL_FILE.into(), TRAIN_REPORT_FILE.into(), "loss_trace.csv".into()];
    Manifest::write(out, Stage::Train, cfg.seed, &cfg.hash(), files)
}

pub fn load_model(out: &Path) -> Result<GcnModel, CliError> {
    let path = Stage::Train.dir(out).join(MODEL_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    Ok(GcnModel::from_json(&text)?)
}

fn hot_start_file(gt: GameType) -> String {
    format!("hot_starts_{gt}.csv")
}

/// Hot starts for every configured game type.
pub fn cmd_generate(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, CliError> {
    Manifest::require(out, Stage::Train, Stage::Generate)?.verify(out)?;
    let dir = prepare(cfg, out, Stage::Generate)?;
    let model = load_model(out)?;
    let mut files = Vec::new();
    for gt in &cfg.game_types {
        let starts = generate_hot_starts(&model, *gt, cfg.generate.count, derive(cfg.seed, &format!("generate/{gt}"), 0))?;
        let name = hot_start_file(*gt);
        write_with(&dir.join(&name), |w| write_hot_starts_csv(&starts, BufWriter::new(w)))?;
        files.push(name);
    }
    Manifest::write(out, Stage::Generate, cfg.seed, &cfg.hash(), files)
}

#[derive(Debug, Deserialize)]
struct HotStartRow {
    game_type: String,
    sample_id: usize,
    pursuer_id: usize,
    x: f64,
    y: f64,
    #[allow(dead_code)]
    heading: f64,
}

/// Hot-start positions for `gt`, one entry per sample.
pub fn load_hot_starts(out: &Path, gt: GameType) -> Result<Vec<Vec<Vec2>>, CliError> {
    let path = Stage::Generate.dir(out).join(hot_start_file(gt));
    let mut reader = csv::Reader::from_path(&path).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let mut samples: BTreeMap<usize, Vec<(usize, Vec2)>> = BTreeMap::new();
    for row in reader.deserialize::<HotStartRow>() {
        let row = row.map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        if row.game_type != gt.to_string() {
            return Err(CliError::Format(format!("{}: row for {}", path.display(), row.game_type)));
        }
        samples.entry(row.sample_id).or_default().push((row.pursuer_id, Vec2::new(row.x, row.y)));
    }
    samples
        .into_values()
        .map(|mut ps| {
            ps.sort_by_key(|p| p.0);
            if ps.len() != gt.n_pursuers || ps.iter().enumerate().any(|(i, p)| p.0 != i) {
                return Err(CliError::Format(format!("{}: incomplete hot start", path.display())));
            }
            Ok(ps.into_iter().map(|p| p.1).collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    HotStart,
    Baseline,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::HotStart => "hot_start",
            Arm::Baseline => "baseline",
        }
    }
}

/// One evaluated episode. Both arms of a pair share `episode`, `seed` and
/// the evader start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalEpisode {
    pub episode: usize,
    pub batch: usize,
    pub seed: u64,
    pub hot_start_id: usize,
    pub log: EpisodeLog,
}

fn arm_file(gt: GameType, arm: Arm) -> String {
    format!("{gt}/{}.jsonl", arm.name())
}

/// Paired hot-start vs baseline episodes for each evaluated game type.
pub fn cmd_evaluate(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, CliError> {
    Manifest::require(out, Stage::Generate, Stage::Evaluate)?.verify(out)?;
    let dir = prepare(cfg, out, Stage::Evaluate)?;
    let ev = &cfg.evaluate;
    let mut files = Vec::new();
    for gt in cfg.eval_game_types() {
        let starts = load_hot_starts(out, gt)?;
        if starts.is_empty() {
            return Err(CliError::Format(format!("no hot starts for {gt}")));
        }
        let sc = Scenario::for_game_type(gt);
        // each batch draws its hot starts without replacement
        let picks: Vec<(usize, usize)> = (0..ev.batches)
            .flat_map(|b| {
                let mut order: Vec<usize> = (0..starts.len()).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive(cfg.seed, &format!("evaluate-batch/{gt}"), b as u64)));
                (0..ev.batch_size).map(move |k| (b, order[k % order.len()]))
            })
            .collect();
        let pairs: Vec<(EvalEpisode, EvalEpisode)> = picks
            .par_iter()
            .enumerate()
            .map(|(k, &(batch, id))| {
                let seed = derive(cfg.seed, &format!("evaluate/{gt}"), k as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let hot = Configuration {
                    pursuers: starts[id].iter().map(|p| AgentState::new(*p, Vec2::ZERO)).collect(),
                    capture_radius: sc.capture_radius,
                    game_type: gt,
                };
                let base = match ev.baseline {
                    Baseline::Uniform => uniform_configuration(gt, &mut rng),
                    Baseline::HotStart => hot.clone(),
                };
                let evaders = sample_evaders(gt, &[&hot, &base], &mut rng)?;
                let mk = |c: &Configuration| -> Result<EvalEpisode, CliError> {
                    Ok(EvalEpisode {
                        episode: k,
                        batch,
                        seed,
                        hot_start_id: id,
                        log: play(c, &evaders, seed)?,
                    })
                };
                Ok((mk(&hot)?, mk(&base)?))
            })
            .collect::<Result<_, CliError>>()?;
        for arm in [Arm::HotStart, Arm::Baseline] {
            let mut text = String::new();
            for (h, b) in &pairs {
                let e = if arm == Arm::HotStart { h } else { b };
                text += &serde_json::to_string(e).map_err(|e| CliError::Format(e.to_string()))?;
                text.push('\n');
            }
            let name = arm_file(gt, arm);
            write_file(&dir.join(&name), text.as_bytes())?;
            files.push(name);
        }
    }
    Manifest::write(out, Stage::Evaluate, cfg.seed, &cfg.hash(), files)
}

pub fn load_arm(out: &Path, gt: GameType, arm: Arm) -> Result<Vec<EvalEpisode>, CliError> {
    let path = Stage::Evaluate.dir(out).join(arm_file(gt, arm));
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    text.lines()
        .map(|l| serde_json::from_str(l).map_err(|e| CliError::Format(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn observations(episodes: &[EvalEpisode]) -> Vec<Observation> {
    episodes
        .iter()
        .flat_map(|e| e.log.survival_observations())
        .map(Observation::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentSummary {
    pub arm: Arm,
    /// Fraction of evaders starting inside the pursuers' initial hull.
    pub initial_inside: f64,
    /// Fraction of (step, live evader) samples inside the current hull.
    pub inside_over_time: f64,
    pub mean_initial_hull_area: f64,
    pub degenerate: bool,
}

fn containment_summary(arm: Arm, episodes: &[EvalEpisode]) -> ContainmentSummary {
    let (mut init_in, mut init_n, mut area) = (0usize, 0usize, 0.0);
    let (mut step_in, mut step_n) = (0usize, 0usize);
    let mut degenerate = false;
    for e in episodes {
        for (k, s) in e.log.steps.iter().enumerate() {
            let ps: Vec<Vec2> = s.pursuers.iter().map(|p| p.position).collect();
            for ev in s.evaders.iter().flatten() {
                let c = containment(&ps, ev.position);
                degenerate |= c.degenerate;
                step_n += 1;
                step_in += c.inside as usize;
                if k == 0 {
                    init_n += 1;
                    init_in += c.inside as usize;
                }
            }
            if k == 0 {
                area += containment(&ps, Vec2::ZERO).hull_area;
            }
        }
    }
    let frac = |a: usize, n: usize| if n == 0 { 0.0 } else { a as f64 / n as f64 };
    ContainmentSummary {
        arm,
        initial_inside: frac(init_in, init_n),
        inside_over_time: frac(step_in, step_n),
        mean_initial_hull_area: if episodes.is_empty() { 0.0 } else { area / episodes.len() as f64 },
        degenerate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game_type: GameType,
    pub episodes: usize,
    pub survival_hot_start_at_horizon: f64,
    pub survival_baseline_at_horizon: f64,
    pub log_rank: LogRank,
    pub containment: Vec<ContainmentSummary>,
    /// Generated hot starts scored against the game type's front.
    pub hot_start_indicators: IndicatorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub seed: u64,
    pub config_hash: String,
    pub training_initial: hotstart_core::gcn::EpochMetrics,
    pub training_final: hotstart_core::gcn::EpochMetrics,
    pub games: Vec<GameReport>,
}

/// Survival curves, log-rank tests, containment, heatmaps and indicators.
pub fn cmd_report(cfg: &PipelineConfig, out: &Path) -> Result<ReportSummary, CliError> {
    Manifest::require(out, Stage::Evaluate, Stage::Report)?.verify(out)?;
    Manifest::require(out, Stage::Train, Stage::Report)?;
    let dir = prepare(cfg, out, Stage::Report)?;
    let train_report: TrainReport = read_json(&Stage::Train.dir(out).join(TRAIN_REPORT_FILE))?;
    let fronts: BTreeMap<GameType, ParetoFront> =
        load_fronts(cfg, out)?.into_iter().map(|f| (f.game_type, f)).collect();
    let mut files = Vec::new();
    let mut games = Vec::new();
    for gt in cfg.eval_game_types() {
        let sc = Scenario::for_game_type(gt);
        let horizon = sc.horizon as f64;
        let hot = load_arm(out, gt, Arm::HotStart)?;
        let base = load_arm(out, gt, Arm::Baseline)?;
        let (oh, ob) = (observations(&hot), observations(&base));
        let (kh, kb) = (kaplan_meier(&oh, horizon)?, kaplan_meier(&ob, horizon)?);
        let name = format!("survival_{gt}.csv");
        write_with(&dir.join(&name), |w| {
            use std::io::Write;
            writeln!(w, "time,hot_start,baseline")?;
            for t in 0..=sc.horizon {
                writeln!(w, "{},{},{}", t, kh.survival_at(t as f64), kb.survival_at(t as f64))?;
            }
            Ok(())
        })?;
        files.push(name);

        for (arm, eps) in [(Arm::HotStart, &hot), (Arm::Baseline, &base)] {
            let mut hm = Heatmap::new(cfg.report.heatmap_resolution)?;
            for e in eps.iter() {
                hm.add_log(&e.log);
            }
            let stem = format!("heatmap_{gt}_{}", arm.name());
            write_with(&dir.join(format!("{stem}.csv")), |w| hm.write_csv(w))?;
            write_with(&dir.join(format!("{stem}.pgm")), |w| hm.write_pgm(w))?;
            files.push(format!("{stem}.csv"));
            files.push(format!("{stem}.pgm"));
        }

        let front = fronts
            .get(&gt)
            .ok_or_else(|| CliError::Format(format!("no front for {gt}")))?;
        let samples = default_evader_samples(gt);
        let generated: Vec<Vec<f64>> = load_hot_starts(out, gt)?
            .iter()
            .map(|ps| {
                let c = pursuer_config(ps, gt, sc.capture_radius);
                Ok(aggregate_features(&c, &samples)?.unit_objectives().to_vec())
            })
            .collect::<Result<_, CliError>>()?;
        let target: Vec<Vec<f64>> = front.unit_objective_points().iter().map(|p| p.to_vec()).collect();

        games.push(GameReport {
            game_type: gt,
            episodes: hot.len(),
            survival_hot_start_at_horizon: kh.survival_at(horizon),
            survival_baseline_at_horizon: kb.survival_at(horizon),
            log_rank: log_rank(&oh, &ob)?,
            containment: vec![containment_summary(Arm::HotStart, &hot), containment_summary(Arm::Baseline, &base)],
            hot_start_indicators: IndicatorReport::compute(&generated, &target, &HV_REFERENCE)?,
        });
    }

    write_with(&dir.join("containment.csv"), |w| {
        use std::io::Write;
        writeln!(w, "game_type,arm,initial_inside,inside_over_time,mean_initial_hull_area,degenerate")?;
        for g in &games {
            for c in &g.containment {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    g.game_type,
                    c.arm.name(),
                    c.initial_inside,
                    c.inside_over_time,
                    c.mean_initial_hull_area,
                    c.degenerate
                )?;
            }
        }
        Ok(())
    })?;
    files.push("containment.csv".into());

    let log_ranks: BTreeMap<String, &LogRank> = games.iter().map(|g| (g.game_type.to_string(), &g.log_rank)).collect();
    write_json(&dir.join("log_rank.json"), &log_ranks)?;
    files.push("log_rank.json".into());

    let summary = ReportSummary {
        seed: cfg.seed,
        config_hash: cfg.hash(),
        training_initial: train_report.metrics.first().cloned().ok_or_else(|| CliError::Format("empty training report".into()))?,
        training_final: train_report.metrics.last().cloned().ok_or_else(|| CliError::Format("empty training report".into()))?,
        games,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    files.push("summary.json".into());
    Manifest::write(out, Stage::Report, cfg.seed, &cfg.hash(), files)?;
    Ok(summary)
}

/// Every stage in order.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<ReportSummary, CliError> {
    cfg.validate()?;
    cmd_simulate(cfg, out)?;
    cmd_build_gfs(cfg, out)?;
    cmd_train(cfg, out)?;
    cmd_generate(cfg, out)?;
    cmd_evaluate(cfg, out)?;
    cmd_report(cfg, out)
}
