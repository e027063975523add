//! Pareto loss and its gradient with respect to generated positions.

use std::f64::consts::PI;

use crate::geometry::Vec2;
use crate::gfs::utility::HEADING_EPS;
use crate::gfs::FeatureVector;
use crate::sim::{AgentState, Configuration, GameType};

use super::GcnError;

/// Configuration read off generated positions: each pursuer's velocity
/// points at the arena origin (magnitude equal to its distance from it).
pub fn pursuer_config(positions: &[Vec2], game_type: GameType, capture_radius: f64) -> Configuration {
    Configuration {
        pursuers: positions.iter().map(|p| AgentState::new(*p, -*p)).collect(),
        capture_radius,
        game_type,
    }
}

/// Index and distance of the closest front point; lowest index on ties.
pub fn nearest_front_point(y: &FeatureVector, front: &[FeatureVector]) -> Result<(usize, f64), GcnError> {
    front
        .iter()
        .enumerate()
        .map(|(k, f)| (k, y.distance_to(f)))
        .fold(None, |best: Option<(usize, f64)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
        .ok_or(GcnError::EmptyFront)
}

/// Distance from `y` to the nearest front member.
pub fn pareto_loss(y: &FeatureVector, front: &[FeatureVector]) -> Result<f64, GcnError> {
    nearest_front_point(y, front).map(|(_, d)| d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub loss: f64,
    pub features: FeatureVector,
    pub nearest: usize,
    /// `d loss / d position` per pursuer.
    pub d_positions: Vec<Vec2>,
}

/// Raw utilities of one pursuer against one evader set, with their
/// gradients in the pursuer position (velocity fixed to `-p`).
fn utilities_with_grad(p: Vec2, evaders: &[Vec2], r: f64) -> ([f64; 3], [Vec2; 3]) {
    let m = evaders.len() as f64;
    let v = -p;
    let vn = v.norm();
    let mut u = [0.0; 3];
    let mut g = [Vec2::ZERO; 3];
    let mut best = (f64::INFINITY, Vec2::ZERO);
    for e in evaders {
        let w = *e - p;
        let d = w.norm();
        let unit = if d > 0.0 { -w / d } else { Vec2::ZERO }; // d|p - e| / dp

        let z = (r - d) / r;
        let s = 1.0 / (1.0 + (-z).exp());
        u[0] += 2.0 * s / m;
        g[0] += unit * (2.0 * s * (1.0 - s) * (-1.0 / r) / m);

        if d < best.0 {
            best = (d, unit);
        }

        let a = v.dot(w);
        let b = vn * d + HEADING_EPS;
        let c = a / b;
        u[2] += c.clamp(-1.0, 1.0).acos() / PI / m;
        if c.abs() < 1.0 && vn > 0.0 && d > 0.0 {
            let da = -w - v;
            let db = -(v / vn) * d - (w / d) * vn;
            let dc = (da * b - db * a) / (b * b);
            g[2] += dc * (-1.0 / (1.0 - c * c).sqrt() / PI / m);
        }
    }
    u[1] = best.0;
    g[1] = best.1;
    (u, g)
}

/// Pareto loss of the configuration at `positions` and its gradient.
pub fn loss_and_grad(
    positions: &[Vec2],
    evader_samples: &[Vec<Vec2>],
    capture_radius: f64,
    front: &[FeatureVector],
) -> Result<LossEval, GcnError> {
    if front.is_empty() {
        return Err(GcnError::EmptyFront);
    }
    if positions.is_empty() || evader_samples.is_empty() || evader_samples.iter().any(Vec::is_empty) {
        return Err(GcnError::Shape("need pursuers and non-empty evader samples".into()));
    }
    let scale = 1.0 / (positions.len() * evader_samples.len()) as f64;
    let mut total = [0.0; 3];
    let mut d_total: Vec<[Vec2; 3]> = vec![[Vec2::ZERO; 3]; positions.len()];
    for (i, p) in positions.iter().enumerate() {
        for sample in evader_samples {
            let (u, g) = utilities_with_grad(*p, sample, capture_radius);
            for k in 0..3 {
                total[k] += u[k] * scale;
                d_total[i][k] += g[k] * scale;
            }
        }
    }
    let sum: f64 = total.iter().sum();
    let features = FeatureVector::from_raw(total).map_err(|e| GcnError::Features(e.to_string()))?;
    let y = features.as_array();
    let (nearest, loss) = nearest_front_point(&features, front)?;
    let target = front[nearest].as_array();
    let dl_dy: [f64; 3] = if loss > 0.0 {
        [0, 1, 2].map(|k| (y[k] - target[k]) / loss)
    } else {
        [0.0; 3]
    };
    // d loss / d U_m = (g_m - g . y) / S for y = U / S
    let gy: f64 = (0..3).map(|k| dl_dy[k] * y[k]).sum();
    let dl_du = [0, 1, 2].map(|m| (dl_dy[m] - gy) / sum);
    let d_positions = d_total
        .iter()
        .map(|du| du[0] * dl_du[0] + du[1] * dl_du[1] + du[2] * dl_du[2])
        .collect();
    Ok(LossEval {
        loss,
        features,
        nearest,
        d_positions,
    })
}
