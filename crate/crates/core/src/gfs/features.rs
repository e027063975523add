//! Normalized feature vectors and their aggregation over pursuers and
//! sampled evader scenarios.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Vec2, WORLD_MAX, WORLD_MIN};
use crate::sim::{Configuration, GameType};

use super::utility::{mean_capture, u_distance, u_heading};
use super::GfsError;

/// Number of evader scenarios features are averaged over.
pub const DEFAULT_EVADER_SAMPLES: usize = 32;
pub const DEFAULT_SAMPLE_SEED: u64 = 0x5EED_0F_E7ADE5;

/// Point in the objective space; components sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub capture: f64,
    pub distance: f64,
    pub heading: f64,
}

impl FeatureVector {
    /// Proportional normalization of raw `[capture, distance, heading]`.
    pub fn from_raw(raw: [f64; 3]) -> Result<Self, GfsError> {
        if raw.iter().any(|u| !u.is_finite() || *u < 0.0) {
            return Err(GfsError::DegenerateUtilities(format!("{raw:?}")));
        }
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) {
            return Err(GfsError::DegenerateUtilities("all utilities are zero".into()));
        }
        Ok(Self {
            capture: raw[0] / sum,
            distance: raw[1] / sum,
            heading: raw[2] / sum,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.capture, self.distance, self.heading]
    }

    /// Minimization-sense objectives `[-capture, distance, -heading]`.
    pub fn objectives(&self) -> [f64; 3] {
        [-self.capture, self.distance, -self.heading]
    }

    /// Objectives shifted into the unit box: `[1 - capture, distance,
    /// 1 - heading]`. Dominance is unchanged by the shift.
    pub fn unit_objectives(&self) -> [f64; 3] {
        [1.0 - self.capture, self.distance, 1.0 - self.heading]
    }

    pub fn distance_to(&self, other: &FeatureVector) -> f64 {
        let (a, b) = (self.as_array(), other.as_array());
        a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }
}

/// Raw (unnormalized) utilities `[capture, distance, heading / pi]` of one
/// pursuer against one evader set.
pub fn raw_utilities(
    position: Vec2,
    velocity: Vec2,
    evaders: &[Vec2],
    capture_radius: f64,
) -> Result<[f64; 3], GfsError> {
    Ok([
        mean_capture(position, evaders, capture_radius)?,
        u_distance(position, evaders)?,
        u_heading(velocity, position, evaders)? / PI,
    ])
}

/// Raw utilities of each pursuer averaged over the evader samples.
pub fn per_pursuer_raw(
    config: &Configuration,
    evader_samples: &[Vec<Vec2>],
) -> Result<Vec<[f64; 3]>, GfsError> {
    if evader_samples.is_empty() {
        return Err(GfsError::NoEvaders);
    }
    let m = evader_samples.len() as f64;
    config
        .pursuers
        .iter()
        .map(|p| {
            let mut acc = [0.0; 3];
            for sample in evader_samples {
                let u = raw_utilities(p.position, p.velocity, sample, config.capture_radius)?;
                for k in 0..3 {
                    acc[k] += u[k];
                }
            }
            Ok(acc.map(|a| a / m))
        })
        .collect()
}

/// Per-pursuer feature vectors (each normalized on its own).
pub fn per_pursuer_features(
    config: &Configuration,
    evader_samples: &[Vec<Vec2>],
) -> Result<Vec<FeatureVector>, GfsError> {
    per_pursuer_raw(config, evader_samples)?
        .into_iter()
        .map(FeatureVector::from_raw)
        .collect()
}

/// Utilities averaged over pursuers and evader samples, then normalized.
pub fn aggregate_features(
    config: &Configuration,
    evader_samples: &[Vec<Vec2>],
) -> Result<FeatureVector, GfsError> {
    let per = per_pursuer_raw(config, evader_samples)?;
    if per.is_empty() {
        return Err(GfsError::TooFewPursuers(0));
    }
    let n = per.len() as f64;
    let mut mean = [0.0; 3];
    for u in &per {
        for k in 0..3 {
            mean[k] += u[k] / n;
        }
    }
    FeatureVector::from_raw(mean)
}

/// `count` evader-position sets drawn uniformly over the arena.
pub fn evader_samples(n_evaders: usize, count: usize, seed: u64) -> Vec<Vec<Vec2>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n_evaders)
                .map(|_| {
                    Vec2::new(
                        rng.random_range(WORLD_MIN..=WORLD_MAX),
                        rng.random_range(WORLD_MIN..=WORLD_MAX),
                    )
                })
                .collect()
        })
        .collect()
}

/// The fixed evader samples used for a game type.
pub fn default_evader_samples(game_type: GameType) -> Vec<Vec<Vec2>> {
    let seed = DEFAULT_SAMPLE_SEED
        ^ ((game_type.n_pursuers as u64) << 8)
        ^ game_type.n_evaders as u64;
    evader_samples(game_type.n_evaders, DEFAULT_EVADER_SAMPLES, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::AgentState;

    fn config(states: Vec<AgentState>, n_e: usize) -> Configuration {
        let gt = GameType::new(states.len().max(2), n_e).unwrap();
        Configuration {
            pursuers: states,
            capture_radius: 0.1,
            game_type: gt,
        }
    }

    #[test]
    fn single_pursuer_sums_to_one() {
        let c = config(vec![AgentState::new(Vec2::new(0.2, 0.1), Vec2::new(0.0, 1.0))], 1);
        let f = aggregate_features(&c, &[vec![Vec2::new(-0.4, 0.5)]]).unwrap();
        assert!((f.capture + f.distance + f.heading - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_pursuer_matches_single() {
        let s = AgentState::new(Vec2::new(0.2, 0.1), Vec2::new(0.3, -0.4));
        let samples = evader_samples(2, 5, 3);
        let one = aggregate_features(&config(vec![s], 2), &samples).unwrap();
        let two = aggregate_features(&config(vec![s, s], 2), &samples).unwrap();
        assert!(one.distance_to(&two) < 1e-15);
    }

    #[test]
    fn hand_computed_two_pursuers() {
        // pursuers at (0,0) moving east and (0.3,0.4) moving north; one
        // evader at (0.6, 0.8); r = 0.1.
        let c = config(
            vec![
                AgentState::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)),
                AgentState::new(Vec2::new(0.3, 0.4), Vec2::new(0.0, 1.0)),
            ],
            1,
        );
        let f = aggregate_features(&c, &[vec![Vec2::new(0.6, 0.8)]]).unwrap();
        let cap = |d: f64| 2.0 * (1.0 - 1.0 / (1.0 + ((0.1 - d) / 0.1).exp()));
        // distances 1.0 and 0.5; cosines 0.6 and 0.8
        let c_mean = (cap(1.0) + cap(0.5)) / 2.0;
        let d_mean = 0.75;
        let h1 = (0.6f64 / (1.0 + 1e-9)).acos() / PI;
        let h2 = (0.4f64 / (0.5 + 1e-9)).acos() / PI;
        let h_mean = (h1 + h2) / 2.0;
        let s = c_mean + d_mean + h_mean;
        assert!((f.capture - c_mean / s).abs() < 1e-12);
        assert!((f.distance - d_mean / s).abs() < 1e-12);
        assert!((f.heading - h_mean / s).abs() < 1e-12);
    }

    #[test]
    fn degenerate_raw_rejected() {
        assert!(FeatureVector::from_raw([0.0, 0.0, 0.0]).is_err());
        assert!(FeatureVector::from_raw([f64::NAN, 1.0, 0.0]).is_err());
    }

    #[test]
    fn samples_deterministic_and_in_world() {
        let a = evader_samples(3, 32, 11);
        let b = evader_samples(3, 32, 11);
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
        assert!(a.iter().flatten().all(|e| e.in_world()));
    }
}
