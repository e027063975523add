//! Pipeline orchestration for hot-start generation and evaluation:
//! configuration, seed derivation, artifact manifests and the six stages.

pub mod config;
pub mod manifest;
pub mod seeds;
pub mod stages;

use std::path::{Path, PathBuf};

use hotstart_core::gcn::GcnError;
use hotstart_core::gfs::GfsError;
use hotstart_core::metrics::MetricsError;
use hotstart_core::SimError;
use thiserror::Error;

pub use config::{Baseline, PipelineConfig, Preset};
pub use manifest::{Manifest, Stage};
pub use stages::{
    cmd_build_gfs, cmd_evaluate, cmd_generate, cmd_report, cmd_simulate, cmd_train, run_pipeline, ReportSummary,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("stage `{stage}` needs `{upstream}` to run first")]
    MissingUpstream { stage: Stage, upstream: Stage },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad artifact: {0}")]
    Format(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gfs(#[from] GfsError),
    #[error(transparent)]
    Gcn(#[from] GcnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
