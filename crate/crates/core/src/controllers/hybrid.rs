//! Hybrid geometric / value-function control for many-vs-many games.

use ndarray::Array2;

use crate::geometry::Vec2;

use super::grid::{upwind_gradient, Role, ValueGrid};
use super::ControlError;

const NORM_EPS: f64 = 1e-12;
const AVOID_DISTANCE_FLOOR: f64 = 1e-6;

/// Relative bearing `atan2` of the unit direction from pursuer `i` to evader
/// `j`. Logged alongside the assignment; not part of the cost.
pub fn bearing_angles(pursuers: &[Vec2], evaders: &[Vec2]) -> Array2<f64> {
    Array2::from_shape_fn((pursuers.len(), evaders.len()), |(i, j)| {
        (evaders[j] - pursuers[i]).normalized_or_zero(NORM_EPS).angle()
    })
}

/// Assignment cost `alpha d_ij + (1 - alpha) V~(e_j)`.
///
/// `V~` is the bilinearly interpolated value at each evader, min-max
/// rescaled onto `[min d_ij, max d_ij]` so both terms share units. When all
/// evaders see the same value the rescaled term sits at the midpoint.
pub fn hybrid_cost_matrix(
    pursuers: &[Vec2],
    evaders: &[Vec2],
    grid: &ValueGrid,
    alpha: f64,
) -> Result<Array2<f64>, ControlError> {
    if evaders.is_empty() {
        return Err(ControlError::NoEvaders);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ControlError::InvalidWeight(alpha));
    }
    let dist = Array2::from_shape_fn((pursuers.len(), evaders.len()), |(i, j)| {
        pursuers[i].distance(evaders[j])
    });
    let (dmin, dmax) = dist
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));

    let raw: Vec<f64> = evaders.iter().map(|e| grid.interpolate(*e)).collect();
    let (vmin, vmax) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scaled: Vec<f64> = raw
        .iter()
        .map(|&v| {
            if vmax - vmin > NORM_EPS {
                dmin + (v - vmin) / (vmax - vmin) * (dmax - dmin)
            } else {
                0.5 * (dmin + dmax)
            }
        })
        .collect();

    Ok(Array2::from_shape_fn(dist.dim(), |(i, j)| {
        alpha * dist[[i, j]] + (1.0 - alpha) * scaled[j]
    }))
}

/// Blend of the unit direction to the target and the normalized descent
/// direction of the value function, renormalized. Zero when the pursuer
/// sits on the target or the two directions cancel.
pub fn pursuer_hybrid_control(pursuer: Vec2, target: Vec2, grid: &ValueGrid, alpha: f64) -> Vec2 {
    let to_target = target - pursuer;
    if to_target.norm() <= NORM_EPS {
        return Vec2::ZERO;
    }
    let (gx, gy) = upwind_gradient(grid, grid.cell_of(pursuer), Role::Pursuer);
    let u_gradient = (-Vec2::new(gx, gy)).normalized_or_zero(NORM_EPS);
    blend_directions(to_target.normalized_or_zero(NORM_EPS), u_gradient, alpha)
}

/// `normalize(alpha a + (1 - alpha) b)`, zero if the blend vanishes.
pub fn blend_directions(u_geometric: Vec2, u_gradient: Vec2, alpha: f64) -> Vec2 {
    (u_geometric * alpha + u_gradient * (1.0 - alpha)).normalized_or_zero(1e-9)
}

/// Sum of `(e - p) / |e - p|^2` over pursuers strictly inside `r_avoid`.
pub fn avoidance_vector(evader: Vec2, pursuers: &[Vec2], r_avoid: f64) -> Vec2 {
    pursuers
        .iter()
        .filter(|p| evader.distance(**p) < r_avoid)
        .fold(Vec2::ZERO, |acc, p| {
            let off = evader - *p;
            let d = off.norm().max(AVOID_DISTANCE_FLOOR);
            acc + off / (d * d)
        })
}

/// Ascend the value function while steering away from pursuers inside
/// `r_avoid`. Both parts are normalized before being added.
pub fn evader_escape_control(
    evader: Vec2,
    pursuers: &[Vec2],
    grid: &ValueGrid,
    r_avoid: f64,
) -> Vec2 {
    let (gx, gy) = upwind_gradient(grid, grid.cell_of(evader), Role::Evader);
    let ascent = Vec2::new(gx, gy).normalized_or_zero(NORM_EPS);
    let avoid = avoidance_vector(evader, pursuers, r_avoid).normalized_or_zero(NORM_EPS);
    (ascent + avoid).normalized_or_zero(1e-9)
}
