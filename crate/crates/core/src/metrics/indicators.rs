//! Front-quality indicators: the generational-distance family and exact
//! hypervolume in two and three dimensions.

use serde::{Deserialize, Serialize};

use super::MetricsError;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Dominance-aware distance `|max(a - z, 0)|` from solution `a` to
/// reference point `z` (minimization).
pub fn plus_distance(a: &[f64], z: &[f64]) -> f64 {
    a.iter().zip(z).map(|(x, y)| (x - y).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn check_sets(p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<usize, MetricsError> {
    let dim = p.first().ok_or(MetricsError::EmptySet)?.len();
    if q.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    if p.iter().chain(q).any(|x| x.len() != dim) {
        return Err(MetricsError::DimensionMismatch);
    }
    Ok(dim)
}

/// GD, GD+, IGD and IGD+ with power-mean exponent `p`.
///
/// `solutions` is the approximation set P and `reference` the target set
/// P*. `inverted` averages over P* instead of P; `plus` swaps the Euclidean
/// distance for [`plus_distance`], always measured from a solution to a
/// reference point.
pub fn gd_family(
    solutions: &[Vec<f64>],
    reference: &[Vec<f64>],
    p: f64,
    plus: bool,
    inverted: bool,
) -> Result<f64, MetricsError> {
    check_sets(solutions, reference)?;
    if !(p > 0.0) {
        return Err(MetricsError::InvalidArgument(format!("exponent must be > 0, got {p}")));
    }
    let dist = |sol: &[f64], z: &[f64]| if plus { plus_distance(sol, z) } else { euclid(sol, z) };
    let (outer, inner) = if inverted { (reference, solutions) } else { (solutions, reference) };
    let total: f64 = outer
        .iter()
        .map(|o| {
            inner
                .iter()
                .map(|i| if inverted { dist(i, o) } else { dist(o, i) })
                .fold(f64::INFINITY, f64::min)
                .powf(p)
        })
        .sum();
    Ok((total / outer.len() as f64).powf(1.0 / p))
}

pub fn gd(p_set: &[Vec<f64>], p_star: &[Vec<f64>]) -> Result<f64, MetricsError> {
    gd_family(p_set, p_star, 2.0, false, false)
}

pub fn gd_plus(p_set: &[Vec<f64>], p_star: &[Vec<f64>]) -> Result<f64, MetricsError> {
    gd_family(p_set, p_star, 2.0, true, false)
}

pub fn igd(p_set: &[Vec<f64>], p_star: &[Vec<f64>]) -> Result<f64, MetricsError> {
    gd_family(p_set, p_star, 2.0, false, true)
}

pub fn igd_plus(p_set: &[Vec<f64>], p_star: &[Vec<f64>]) -> Result<f64, MetricsError> {
    gd_family(p_set, p_star, 2.0, true, true)
}

/// Area dominated by 2-D points (already checked against the reference).
fn hv2(points: &mut [[f64; 2]], reference: [f64; 2]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    // staircase sweep: each step spans from its x to the next improving x
    let mut best_y = reference[1];
    let mut stairs: Vec<[f64; 2]> = Vec::new();
    for p in points.iter() {
        if p[1] < best_y {
            stairs.push(*p);
            best_y = p[1];
        }
    }
    for (k, s) in stairs.iter().enumerate() {
        let x_end = stairs.get(k + 1).map_or(reference[0], |n| n[0]);
        area += (x_end - s[0]) * (reference[1] - s[1]);
    }
    area
}

/// Exact hypervolume of `points` against `reference` (minimization), in two
/// or three dimensions.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64, MetricsError> {
    let dim = reference.len();
    if !(dim == 2 || dim == 3) {
        return Err(MetricsError::InvalidArgument(format!(
            "hypervolume supports 2 or 3 objectives, got {dim}"
        )));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(MetricsError::DimensionMismatch);
    }
    if let Some(p) = points.iter().find(|p| p.iter().zip(reference).any(|(x, r)| x > r || !x.is_finite())) {
        return Err(MetricsError::OutsideReference(format!("{p:?} vs {reference:?}")));
    }
    if dim == 2 {
        let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        return Ok(hv2(&mut pts, [reference[0], reference[1]]));
    }
    // sweep along the third objective; each slab carries the 2-D volume of
    // every point already passed
    let mut order: Vec<&Vec<f64>> = points.iter().collect();
    order.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut slab: Vec<[f64; 2]> = Vec::with_capacity(order.len());
    for (k, p) in order.iter().enumerate() {
        slab.push([p[0], p[1]]);
        let z_next = order.get(k + 1).map_or(reference[2], |q| q[2]);
        let depth = z_next - p[2];
        if depth > 0.0 {
            volume += hv2(&mut slab, [reference[0], reference[1]]) * depth;
        }
    }
    Ok(volume)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub gd: f64,
    pub gd_plus: f64,
    pub igd: f64,
    pub igd_plus: f64,
    pub hypervolume: f64,
    pub reference: Vec<f64>,
    pub p: f64,
}

impl IndicatorReport {
    /// All indicators of `solutions` against `target`, with `p = 2`.
    pub fn compute(
        solutions: &[Vec<f64>],
        target: &[Vec<f64>],
        reference: &[f64],
    ) -> Result<Self, MetricsError> {
        Ok(Self {
            gd: gd(solutions, target)?,
            gd_plus: gd_plus(solutions, target)?,
            igd: igd(solutions, target)?,
            igd_plus: igd_plus(solutions, target)?,
            hypervolume: hypervolume(solutions, reference)?,
            reference: reference.to_vec(),
            p: 2.0,
        })
    }
}
