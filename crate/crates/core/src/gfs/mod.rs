//! Graph feature space: utilities, normalized feature vectors, Pareto
//! dominance, the NSGA-II placement search and pursuer graphs.

pub mod features;
pub mod graph;
pub mod nsga2;
pub mod pareto;
pub mod utility;

use thiserror::Error;

use crate::sim::SimError;

pub use crate::sim::Configuration;
pub use features::{
    aggregate_features, default_evader_samples, evader_samples, per_pursuer_features,
    FeatureVector, DEFAULT_EVADER_SAMPLES,
};
pub use graph::{build_graph, pp_edges, ConfigGraph, Edge, NODE_FEATURES};
pub use nsga2::{nsga2_optimize, Nsga2, Nsga2Params, PlacementProblem};
pub use pareto::{dominates, pareto_front, FrontMember, ParetoFront};
pub use utility::{u_capture, u_distance, u_heading};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GfsError {
    #[error("capture radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("at least one evader is required")]
    NoEvaders,
    #[error("utilities cannot be normalized: {0}")]
    DegenerateUtilities(String),
    #[error("need at least 2 pursuers, got {0}")]
    TooFewPursuers(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("empty population")]
    EmptyPopulation,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("serialization: {0}")]
    Serde(String),
}
