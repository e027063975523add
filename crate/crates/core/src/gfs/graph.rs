//! Pursuer graphs: node features plus pursuer-pursuer edges.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::sim::{Configuration, GameType};

use super::features::FeatureVector;
use super::GfsError;

/// Node feature width: three utilities, capture radius, velocity, position
/// and two noise channels.
pub const NODE_FEATURES: usize = 10;
/// Distance floor for coincident pursuers.
pub const EDGE_DISTANCE_FLOOR: f64 = 1e-6;
/// Slack on the mean-distance comparison so exact ties survive rounding.
const MEAN_SLACK: f64 = 1e-12;

/// Column indices into the node feature rows.
pub mod col {
    pub const CAPTURE: usize = 0;
    pub const DISTANCE: usize = 1;
    pub const HEADING: usize = 2;
    pub const RADIUS: usize = 3;
    pub const VX: usize = 4;
    pub const VY: usize = 5;
    pub const X: usize = 6;
    pub const Y: usize = 7;
    pub const NOISE0: usize = 8;
    pub const NOISE1: usize = 9;
}

/// Undirected weighted edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigGraph {
    pub game_type: GameType,
    pub features: Array2<f64>,
    pub edges: Vec<Edge>,
}

impl ConfigGraph {
    pub fn n_nodes(&self) -> usize {
        self.features.nrows()
    }

    /// Dense symmetric weighted adjacency without self-loops.
    pub fn adjacency(&self) -> Array2<f64> {
        let n = self.n_nodes();
        let mut a = Array2::zeros((n, n));
        for e in &self.edges {
            a[[e.i, e.j]] = e.weight;
            a[[e.j, e.i]] = e.weight;
        }
        a
    }

    pub fn positions(&self) -> Vec<Vec2> {
        (0..self.n_nodes())
            .map(|r| Vec2::new(self.features[[r, col::X]], self.features[[r, col::Y]]))
            .collect()
    }
}

/// Edges between pursuers no farther apart than the mean pairwise distance,
/// weighted by inverse distance.
pub fn pp_edges(positions: &[Vec2]) -> Vec<Edge> {
    let n = positions.len();
    if n < 2 {
        return Vec::new();
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j, positions[i].distance(positions[j])));
        }
    }
    let mean = pairs.iter().map(|p| p.2).sum::<f64>() / pairs.len() as f64;
    pairs
        .into_iter()
        .filter(|&(_, _, d)| d <= mean + MEAN_SLACK)
        .map(|(i, j, d)| Edge {
            i,
            j,
            weight: 1.0 / d.max(EDGE_DISTANCE_FLOOR),
        })
        .collect()
}

/// Node rows `[capture, distance, heading, rho, vx, vy, x, y, noise, noise]`
/// with noise drawn uniformly from `[-1, 1]`.
pub fn build_graph<R: Rng + ?Sized>(
    config: &Configuration,
    features: &[FeatureVector],
    rng: &mut R,
) -> Result<ConfigGraph, GfsError> {
    let n = config.pursuers.len();
    if n < 2 {
        return Err(GfsError::TooFewPursuers(n));
    }
    if features.len() != n {
        return Err(GfsError::InvalidParams(format!(
            "{} feature vectors for {n} pursuers",
            features.len()
        )));
    }
    let mut x = Array2::zeros((n, NODE_FEATURES));
    for (r, (p, f)) in config.pursuers.iter().zip(features).enumerate() {
        x[[r, col::CAPTURE]] = f.capture;
        x[[r, col::DISTANCE]] = f.distance;
        x[[r, col::HEADING]] = f.heading;
        x[[r, col::RADIUS]] = config.capture_radius;
        x[[r, col::VX]] = p.velocity.x;
        x[[r, col::VY]] = p.velocity.y;
        x[[r, col::X]] = p.position.x;
        x[[r, col::Y]] = p.position.y;
        x[[r, col::NOISE0]] = rng.random_range(-1.0..=1.0);
        x[[r, col::NOISE1]] = rng.random_range(-1.0..=1.0);
    }
    Ok(ConfigGraph {
        game_type: config.game_type,
        features: x,
        edges: pp_edges(&config.positions()),
    })
}
