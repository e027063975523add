//! Hot-start generation from a trained model.

use std::io::Write;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::gfs::graph::col;
use crate::gfs::{pp_edges, ConfigGraph, NODE_FEATURES};
use crate::sim::{AgentState, Configuration, GameType, Scenario};

use super::model::GcnModel;
use super::GcnError;

pub const DEFAULT_HOT_START_COUNT: usize = 1000;
pub const MIN_PURSUERS: usize = 2;
pub const MAX_PURSUERS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotStart {
    pub game_type: GameType,
    pub sample_id: usize,
    pub positions: Vec<Vec2>,
    /// Heading of each pursuer toward the arena origin.
    pub headings: Vec<f64>,
    pub model_hash: String,
    pub seed: u64,
}

impl HotStart {
    /// Pursuers at rest at the generated positions.
    pub fn configuration(&self, capture_radius: f64) -> Configuration {
        Configuration {
            pursuers: self.positions.iter().map(|p| AgentState::new(*p, Vec2::ZERO)).collect(),
            capture_radius,
            game_type: self.game_type,
        }
    }
}

fn heading_to_origin(p: Vec2) -> f64 {
    (-p.y).atan2(-p.x)
}

/// Random query graph: every feature uniform over the model's training range
/// (noise channels over `[-1, 1]`), capture radius fixed to the scenario's,
/// edges from the sampled positions.
pub fn query_graph<R: Rng + ?Sized>(
    model: &GcnModel,
    game_type: GameType,
    rng: &mut R,
) -> ConfigGraph {
    let n = game_type.n_pursuers;
    let radius = Scenario::for_game_type(game_type).capture_radius;
    let mut x = Array2::zeros((n, NODE_FEATURES));
    for r in 0..n {
        for c in 0..NODE_FEATURES {
            let (lo, hi) = match (&model.input_ranges, c) {
                (_, col::NOISE0 | col::NOISE1) => (-1.0, 1.0),
                (_, col::X | col::Y) | (None, _) => (-1.0, 1.0),
                (Some(rg), _) => (rg.min[c], rg.max[c]),
            };
            x[[r, c]] = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        }
        x[[r, col::RADIUS]] = radius;
    }
    if model.input_ranges.is_none() {
        for r in 0..n {
            for c in [col::CAPTURE, col::DISTANCE, col::HEADING] {
                x[[r, c]] = rng.random_range(0.0..=1.0);
            }
        }
    }
    let positions: Vec<Vec2> = (0..n).map(|r| Vec2::new(x[[r, col::X]], x[[r, col::Y]])).collect();
    ConfigGraph {
        game_type,
        features: x,
        edges: pp_edges(&positions),
    }
}

/// `count` hot starts for `game_type`, deterministic in `seed`.
pub fn generate_hot_starts(
    model: &GcnModel,
    game_type: GameType,
    count: usize,
    seed: u64,
) -> Result<Vec<HotStart>, GcnError> {
    let n = game_type.n_pursuers;
    if !(MIN_PURSUERS..=MAX_PURSUERS).contains(&n) {
        return Err(GcnError::PursuerCount(n));
    }
    model.validate()?;
    let hash = model.hash();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|sample_id| {
            let graph = query_graph(model, game_type, &mut rng);
            let out = model.forward(&graph)?;
            let positions: Vec<Vec2> = out
                .outer_iter()
                .map(|r| Vec2::new(r[0], r[1]).clamp_to_world())
                .collect();
            Ok(HotStart {
                game_type,
                sample_id,
                headings: positions.iter().map(|p| heading_to_origin(*p)).collect(),
                positions,
                model_hash: hash.clone(),
                seed,
            })
        })
        .collect()
}

/// CSV with one row per pursuer: `game_type,sample_id,pursuer_id,x,y,heading`.
pub fn write_hot_starts_csv<W: Write>(starts: &[HotStart], mut w: W) -> std::io::Result<()> {
    writeln!(w, "game_type,sample_id,pursuer_id,x,y,heading")?;
    for s in starts {
        for (k, (p, h)) in s.positions.iter().zip(&s.headings).enumerate() {
            writeln!(w, "{},{},{},{},{},{}", s.game_type, s.sample_id, k, p.x, p.y, h)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_batch() {
        let m = GcnModel::new(3);
        let gt = GameType::new(4, 2).unwrap();
        let a = generate_hot_starts(&m, gt, 20, 9).unwrap();
        let b = generate_hot_starts(&m, gt, 20, 9).unwrap();
        assert_eq!(a, b);
        let c = generate_hot_starts(&m, gt, 20, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn outputs_in_world_and_headings_to_origin() {
        let m = GcnModel::new(1);
        let gt = GameType::new(3, 1).unwrap();
        for s in generate_hot_starts(&m, gt, 50, 2).unwrap() {
            assert_eq!(s.positions.len(), 3);
            for (p, h) in s.positions.iter().zip(&s.headings) {
                assert!(p.in_world());
                let toward = Vec2::from_angle(*h);
                if p.norm() > 1e-9 {
                    assert!((toward.dot(-*p) - p.norm()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn pursuer_count_bounds() {
        let m = GcnModel::new(0);
        for n in [1, 6] {
            let gt = GameType {
                n_pursuers: n,
                n_evaders: 1,
            };
            assert!(matches!(
                generate_hot_starts(&m, gt, 1, 0),
                Err(GcnError::PursuerCount(_))
            ));
        }
    }

    #[test]
    fn csv_rows() {
        let m = GcnModel::new(0);
        let gt = GameType::new(2, 1).unwrap();
        let starts = generate_hot_starts(&m, gt, 3, 0).unwrap();
        let mut buf = Vec::new();
        write_hot_starts_csv(&starts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "game_type,sample_id,pursuer_id,x,y,heading");
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("2x1,0,0,"));
    }
}
