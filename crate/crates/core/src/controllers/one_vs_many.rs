//! Heuristic controllers for a single fast evader against several pursuers.

use crate::geometry::{wrap_angle, Vec2};

use super::ControlError;

/// Floor used when a pursuer sits exactly on the evader.
const DISTANCE_FLOOR: f64 = 1e-9;
/// Guard under the square roots of the escape-heading terms.
const SQRT_GUARD: f64 = 1e-6;

/// The pursuer pair the evader tries to slip between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakestLink {
    pub pair: (usize, usize),
    /// Overlap angle of the chosen pair (smallest over all pairs).
    pub theta: f64,
    /// Escape heading in radians.
    pub heading: f64,
}

/// Half-angle of a pursuer's coverage seen from the evader; zero inside the
/// unit distance.
pub(crate) fn coverage_angle(d: f64) -> f64 {
    if d * d > 1.0 {
        ((1.0 - d * d) / (2.0 * d)).clamp(-1.0, 1.0).acos()
    } else {
        0.0
    }
}

/// Overlap angle of the pursuer pair `(i, j)` as seen from the evader.
pub fn pair_overlap(evader: Vec2, pi: Vec2, pj: Vec2) -> f64 {
    let (di, dj) = (pi.distance(evader), pj.distance(evader));
    let li = (pi - evader).angle();
    let lj = (pj - evader).angle();
    coverage_angle(di) + coverage_angle(dj) - wrap_angle(li - lj)
}

/// Find the weakest pursuer pair and the escape heading through it.
pub fn weakest_link(evader: Vec2, pursuers: &[Vec2]) -> Result<WeakestLink, ControlError> {
    if pursuers.len() < 2 {
        return Err(ControlError::TooFewPursuers(pursuers.len()));
    }
    let mut best: Option<((usize, usize), f64)> = None;
    for i in 0..pursuers.len() {
        for j in (i + 1)..pursuers.len() {
            let theta = pair_overlap(evader, pursuers[i], pursuers[j]);
            if best.is_none_or(|(_, t)| theta < t) {
                best = Some(((i, j), theta));
            }
        }
    }
    let ((i, j), theta) = best.expect("at least one pair");

    let di = pursuers[i].distance(evader).max(DISTANCE_FLOOR);
    let dj = pursuers[j].distance(evader).max(DISTANCE_FLOOR);
    let li = (pursuers[i] - evader).angle();
    let lj = (pursuers[j] - evader).angle();
    let si = (di * di - 2.0).max(SQRT_GUARD).sqrt();
    let sj = (dj * dj - 2.0).max(SQRT_GUARD).sqrt();

    let psi_s = (lj.cos() - lj.sin() / sj) / dj - (li.cos() + li.sin() / si) / di;
    let psi_c = (li.sin() - li.cos() / si) / di - (lj.sin() + lj.cos() / sj) / dj;

    Ok(WeakestLink {
        pair: (i, j),
        theta,
        heading: psi_s.atan2(psi_c),
    })
}

/// Escape heading for the evader.
pub fn evader_weakest_link(evader: Vec2, pursuers: &[Vec2]) -> Result<f64, ControlError> {
    weakest_link(evader, pursuers).map(|w| w.heading)
}

/// Interception heading toward the aim point
/// `x_P + (gamma (x_E - x_P) + rho) / (1 - gamma^2)` (same for y).
pub fn pursuer_intercept_heading(
    pursuer: Vec2,
    evader: Vec2,
    gamma: f64,
    capture_radius: f64,
) -> Result<f64, ControlError> {
    let denom = 1.0 - gamma * gamma;
    if denom.abs() < 1e-12 || !denom.is_finite() {
        return Err(ControlError::SingularSpeedRatio(gamma));
    }
    let delta = evader - pursuer;
    let aim_offset = Vec2::new(
        (gamma * delta.x + capture_radius) / denom,
        (gamma * delta.y + capture_radius) / denom,
    );
    Ok(aim_offset.angle())
}
