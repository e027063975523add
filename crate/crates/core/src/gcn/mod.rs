//! Graph convolutional generator of pursuer configurations: model, Pareto
//! loss, training and hot-start generation.

pub mod generate;
pub mod loss;
pub mod model;
pub mod train;

use thiserror::Error;

use crate::sim::GameType;

pub use generate::{generate_hot_starts, write_hot_starts_csv, HotStart, DEFAULT_HOT_START_COUNT};
pub use loss::{loss_and_grad, nearest_front_point, pareto_loss, pursuer_config, LossEval};
pub use model::{normalized_adjacency, FeatureRanges, GcnModel, Gradients, LAYER_DIMS};
pub use train::{
    default_targets, evaluate_dataset, train, EpochMetrics, GameTarget, Targets, TrainConfig,
    TrainReport, Trainer,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite parameter")]
    NonFinite,
    #[error("serialization: {0}")]
    Serde(String),
    #[error("Pareto front is empty")]
    EmptyFront,
    #[error("feature evaluation: {0}")]
    Features(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no front for game type {0}")]
    MissingFront(GameType),
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("metrics: {0}")]
    Metrics(String),
    #[error("pursuer count {0} outside 2..=5")]
    PursuerCount(usize),
}
