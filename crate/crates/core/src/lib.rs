//! Hot-start pursuer configurations for pursuit-evasion games.
//!
//! The crate covers the simulator and its control laws, the graph feature
//! space with its NSGA-II search, a small graph convolutional network, and
//! the metrics used to compare generated and random starts.

pub mod controllers;
pub mod gcn;
pub mod gfs;
pub mod metrics;
pub mod geometry;
pub mod sim;

pub use geometry::Vec2;
pub use sim::{AgentState, Configuration, EpisodeLog, GameKind, GameType, Scenario, SimError};
