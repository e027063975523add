//! Per-pursuer utilities: capture potential, closest distance and heading
//! alignment.

use crate::geometry::Vec2;

use super::GfsError;

/// Guard added to the norm product in the heading utility.
pub const HEADING_EPS: f64 = 1e-9;

/// Sigmoid capture potential: 1 at `d = r`, above 1 inside the radius,
/// decaying to 0 far away.
pub fn u_capture(d: f64, r: f64) -> Result<f64, GfsError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GfsError::InvalidRadius(r));
    }
    Ok(capture_value(d, r))
}

/// Unchecked form of [`u_capture`] for hot loops; `r` must be positive.
#[inline]
pub(crate) fn capture_value(d: f64, r: f64) -> f64 {
    2.0 * (1.0 - 1.0 / (1.0 + ((-d + r) / r).exp()))
}

/// Distance from `p` to the closest evader.
pub fn u_distance(p: Vec2, evaders: &[Vec2]) -> Result<f64, GfsError> {
    if evaders.is_empty() {
        return Err(GfsError::NoEvaders);
    }
    Ok(evaders.iter().map(|e| p.distance(*e)).fold(f64::INFINITY, f64::min))
}

/// Mean angle (radians) between the pursuer's velocity and the direction to
/// each evader.
pub fn u_heading(v: Vec2, p: Vec2, evaders: &[Vec2]) -> Result<f64, GfsError> {
    if evaders.is_empty() {
        return Err(GfsError::NoEvaders);
    }
    let vn = v.norm();
    let sum: f64 = evaders
        .iter()
        .map(|e| {
            let off = *e - p;
            let c = v.dot(off) / (vn * off.norm() + HEADING_EPS);
            c.clamp(-1.0, 1.0).acos()
        })
        .sum();
    Ok(sum / evaders.len() as f64)
}

/// Mean capture potential of one pursuer over an evader set.
pub fn mean_capture(p: Vec2, evaders: &[Vec2], r: f64) -> Result<f64, GfsError> {
    if evaders.is_empty() {
        return Err(GfsError::NoEvaders);
    }
    u_capture(0.0, r)?;
    let total: f64 = evaders.iter().map(|e| capture_value(p.distance(*e), r)).sum();
    Ok(total / evaders.len() as f64)
}
