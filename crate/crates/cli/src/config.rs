//! Pipeline configuration: TOML file, presets and flag overrides.

use std::path::Path;

use hotstart_core::gcn::TrainConfig;
use hotstart_core::gfs::Nsga2Params;
use hotstart_core::GameType;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

mod game_types {
    use hotstart_core::GameType;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[GameType], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|g| g.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<GameType>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub episodes_per_game: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { episodes_per_game: 10 }
    }
}

/// What the hot starts are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Pursuers placed uniformly over the arena.
    Uniform,
    /// The hot starts themselves; both arms are identical.
    HotStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateConfig {
    pub count: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self { count: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    /// Game types to evaluate; empty means all configured game types.
    #[serde(with = "game_types")]
    pub game_types: Vec<GameType>,
    pub batches: usize,
    pub batch_size: usize,
    pub baseline: Baseline,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            game_types: Vec::new(),
            batches: 10,
            batch_size: 100,
            baseline: Baseline::Uniform,
        }
    }
}

impl EvaluateConfig {
    pub fn episodes(&self) -> usize {
        self.batches * self.batch_size
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub heatmap_resolution: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self { heatmap_resolution: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(with = "game_types")]
    pub game_types: Vec<GameType>,
    pub simulate: SimulateConfig,
    pub gfs: Nsga2Params,
    pub train: TrainConfig,
    pub generate: GenerateConfig,
    pub evaluate: EvaluateConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            game_types: GameType::standard_set(),
            simulate: SimulateConfig::default(),
            gfs: Nsga2Params::default(),
            train: TrainConfig::default(),
            generate: GenerateConfig::default(),
            evaluate: EvaluateConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Population 500 x 200 generations, batch 1024, 1000 hot starts, 10 x 100 evaluation episodes.
    Paper,
    /// Sizes that finish in minutes on a laptop.
    Desk,
    /// Smallest sizes that still exercise every stage.
    Smoke,
}

impl PipelineConfig {
    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Paper => Self::default(),
            Preset::Desk => Self {
                gfs: Nsga2Params {
                    population_size: 40,
                    generations: 20,
                    ..Nsga2Params::default()
                },
                train: TrainConfig::desk(),
                generate: GenerateConfig { count: 200 },
                evaluate: EvaluateConfig {
                    batches: 2,
                    batch_size: 100,
                    ..EvaluateConfig::default()
                },
                ..Self::default()
            },
            Preset::Smoke => Self {
                simulate: SimulateConfig { episodes_per_game: 1 },
                gfs: Nsga2Params {
                    population_size: 50,
                    generations: 20,
                    ..Nsga2Params::default()
                },
                train: TrainConfig {
                    epochs: 30,
                    ..TrainConfig::desk()
                },
                generate: GenerateConfig { count: 50 },
                evaluate: EvaluateConfig {
                    batches: 1,
                    batch_size: 50,
                    ..EvaluateConfig::default()
                },
                ..Self::default()
            },
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, CliError> {
        toml::from_str(s).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.game_types.is_empty() {
            return bad("no game types configured".into());
        }
        for gt in self.game_types.iter().chain(&self.evaluate.game_types) {
            gt.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        for gt in &self.evaluate.game_types {
            if !self.game_types.contains(gt) {
                return bad(format!("evaluation game type {gt} is not among the configured game types"));
            }
        }
        self.gfs.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.train.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.generate.count == 0 {
            return bad("hot-start count must be >= 1".into());
        }
        if self.evaluate.episodes() == 0 {
            return bad("evaluation needs at least one episode".into());
        }
        if self.report.heatmap_resolution < 8 {
            return bad("heatmap resolution must be >= 8".into());
        }
        Ok(())
    }

    pub fn eval_game_types(&self) -> Vec<GameType> {
        if self.evaluate.game_types.is_empty() {
            self.game_types.clone()
        } else {
            self.evaluate.game_types.clone()
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
