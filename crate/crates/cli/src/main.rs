use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hotstart_cli::config::{Baseline, PipelineConfig, Preset};
use hotstart_cli::stages;
use hotstart_core::GameType;

#[derive(Parser)]
#[command(name = "hotstart", version, about = "Pursuer hot-start generation and evaluation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Run episodes from uniform random starts.
    Simulate,
    /// Search pursuer configurations with NSGA-II and build the graph dataset.
    BuildGfs,
    /// Train the GCN generator.
    Train,
    /// Sample hot starts from the trained generator.
    Generate,
    /// Run paired hot-start vs baseline episodes.
    Evaluate,
    /// Survival, log-rank, containment, heatmaps and indicators.
    Report,
    /// Every stage in order.
    Pipeline,
    /// Print the resolved configuration as TOML.
    ShowConfig,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base configuration when no file is given.
    #[arg(long, global = true, value_enum, default_value = "paper")]
    preset: Preset,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Game type such as `4x2`; repeat to select several.
    #[arg(long = "game-type", global = true)]
    game_types: Vec<String>,
    /// Evaluated game type; repeat to select several.
    #[arg(long = "eval-game-type", global = true)]
    eval_game_types: Vec<String>,
    #[arg(long, global = true)]
    episodes_per_game: Option<usize>,
    #[arg(long, global = true)]
    population: Option<usize>,
    #[arg(long, global = true)]
    generations: Option<usize>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    #[arg(long, global = true)]
    weight_decay: Option<f64>,
    #[arg(long, global = true)]
    train_seed: Option<u64>,
    /// Hot starts generated per game type.
    #[arg(long, global = true)]
    count: Option<usize>,
    #[arg(long, global = true)]
    batches: Option<usize>,
    #[arg(long, global = true)]
    eval_batch_size: Option<usize>,
    #[arg(long, global = true, value_enum)]
    baseline: Option<Baseline>,
    #[arg(long, global = true)]
    heatmap_resolution: Option<usize>,
}

fn parse_game_types(v: &[String]) -> anyhow::Result<Vec<GameType>> {
    v.iter()
        .map(|s| s.parse::<GameType>().map_err(|e| anyhow::anyhow!("game type `{s}`: {e}")))
        .collect()
}

impl Common {
    fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::preset(self.preset),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if !self.game_types.is_empty() {
            c.game_types = parse_game_types(&self.game_types)?;
        }
        if !self.eval_game_types.is_empty() {
            c.evaluate.game_types = parse_game_types(&self.eval_game_types)?;
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+;)*) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set! {
            episodes_per_game => simulate.episodes_per_game;
            population => gfs.population_size;
            generations => gfs.generations;
            epochs => train.epochs;
            batch_size => train.batch_size;
            learning_rate => train.learning_rate;
            weight_decay => train.weight_decay;
            train_seed => train.seed;
            count => generate.count;
            batches => evaluate.batches;
            eval_batch_size => evaluate.batch_size;
            baseline => evaluate.baseline;
            heatmap_resolution => report.heatmap_resolution;
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = cli.common.resolve().context("invalid configuration")?;
    let out = &cli.common.out;
    match cli.command {
        Command::Simulate => {
            stages::cmd_simulate(&cfg, out)?;
        }
        Command::BuildGfs => {
            stages::cmd_build_gfs(&cfg, out)?;
        }
        Command::Train => {
            stages::cmd_train(&cfg, out)?;
        }
        Command::Generate => {
            stages::cmd_generate(&cfg, out)?;
        }
        Command::Evaluate => {
            stages::cmd_evaluate(&cfg, out)?;
        }
        Command::Report => print_summary(&stages::cmd_report(&cfg, out)?),
        Command::Pipeline => print_summary(&stages::run_pipeline(&cfg, out)?),
        Command::ShowConfig => print!("{}", cfg.to_toml_string()),
    }
    Ok(())
}

fn print_summary(s: &stages::ReportSummary) {
    println!("game  episodes  S_hot(T)  S_base(T)  chi2      p");
    for g in &s.games {
        println!(
            "{:<5} {:>8}  {:>8.4}  {:>9.4}  {:>8.3}  {:.3e}",
            g.game_type.to_string(),
            g.episodes,
            g.survival_hot_start_at_horizon,
            g.survival_baseline_at_horizon,
            g.log_rank.chi_square,
            g.log_rank.p_value
        );
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
