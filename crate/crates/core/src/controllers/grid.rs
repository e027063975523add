//! Value function on a uniform grid over the arena, upwind differences and
//! the explicit HJI update.

use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::geometry::{Vec2, WORLD_MAX, WORLD_MIN};

use super::ControlError;

pub const DEFAULT_RESOLUTION: usize = 41;

/// Which player's upwind convention to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Minimizing player.
    Pursuer,
    /// Maximizing player.
    Evader,
}

/// Node `(i, j)` sits at `(-1 + i dx, -1 + j dy)`; `values[[i, j]]` with `i`
/// along x and `j` along y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGrid {
    resolution: usize,
    spacing: f64,
    values: Array2<f64>,
}

impl ValueGrid {
    pub fn from_fn(
        resolution: usize,
        f: impl Fn(Vec2) -> f64,
    ) -> Result<Self, ControlError> {
        if resolution < 3 {
            return Err(ControlError::InvalidGrid(format!(
                "resolution must be >= 3, got {resolution}"
            )));
        }
        let spacing = (WORLD_MAX - WORLD_MIN) / (resolution - 1) as f64;
        let values = Array2::from_shape_fn((resolution, resolution), |(i, j)| {
            f(Vec2::new(
                WORLD_MIN + i as f64 * spacing,
                WORLD_MIN + j as f64 * spacing,
            ))
        });
        Self::from_values(values)
    }

    pub fn from_values(values: Array2<f64>) -> Result<Self, ControlError> {
        let (nx, ny) = values.dim();
        if nx != ny || nx < 3 {
            return Err(ControlError::InvalidGrid(format!(
                "grid must be square with side >= 3, got {nx}x{ny}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ControlError::InvalidGrid("non-finite value".into()));
        }
        Ok(Self {
            resolution: nx,
            spacing: (WORLD_MAX - WORLD_MIN) / (nx - 1) as f64,
            values,
        })
    }

    pub fn constant(resolution: usize, value: f64) -> Result<Self, ControlError> {
        Self::from_fn(resolution, |_| value)
    }

    /// `V(x) = min_j |x - target_j| - offset`; constant zero when there are no
    /// targets.
    pub fn distance_field(
        resolution: usize,
        targets: &[Vec2],
        offset: f64,
    ) -> Result<Self, ControlError> {
        if targets.is_empty() {
            return Self::constant(resolution, 0.0);
        }
        Self::from_fn(resolution, |x| {
            targets
                .iter()
                .map(|t| x.distance(*t))
                .fold(f64::INFINITY, f64::min)
                - offset
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Grid spacing (equal on both axes).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            WORLD_MIN + i as f64 * self.spacing,
            WORLD_MIN + j as f64 * self.spacing,
        )
    }

    /// Nearest node to a world position (clamped into the grid).
    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let idx = |c: f64| {
            let k = ((c - WORLD_MIN) / self.spacing).round();
            k.clamp(0.0, (self.resolution - 1) as f64) as usize
        };
        (idx(p.x), idx(p.y))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Bilinear interpolation; positions outside the arena are clamped.
    pub fn interpolate(&self, p: Vec2) -> f64 {
        let last = (self.resolution - 1) as f64;
        let fx = ((p.x - WORLD_MIN) / self.spacing).clamp(0.0, last);
        let fy = ((p.y - WORLD_MIN) / self.spacing).clamp(0.0, last);
        let i0 = (fx.floor() as usize).min(self.resolution - 2);
        let j0 = (fy.floor() as usize).min(self.resolution - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v = &self.values;
        (1.0 - tx) * (1.0 - ty) * v[[i0, j0]]
            + tx * (1.0 - ty) * v[[i0 + 1, j0]]
            + (1.0 - tx) * ty * v[[i0, j0 + 1]]
            + tx * ty * v[[i0 + 1, j0 + 1]]
    }

    /// One-sided differences `(forward, backward)` along x at node `(i, j)`;
    /// `None` where the neighbor is off the grid.
    fn diffs_x(&self, i: usize, j: usize) -> (Option<f64>, Option<f64>) {
        let v = &self.values;
        let fwd = (i + 1 < self.resolution).then(|| (v[[i + 1, j]] - v[[i, j]]) / self.spacing);
        let bwd = (i > 0).then(|| (v[[i, j]] - v[[i - 1, j]]) / self.spacing);
        (fwd, bwd)
    }

    fn diffs_y(&self, i: usize, j: usize) -> (Option<f64>, Option<f64>) {
        let v = &self.values;
        let fwd = (j + 1 < self.resolution).then(|| (v[[i, j + 1]] - v[[i, j]]) / self.spacing);
        let bwd = (j > 0).then(|| (v[[i, j]] - v[[i, j - 1]]) / self.spacing);
        (fwd, bwd)
    }

    /// Serialize as CSV, one line per y row (bottom to top), x increasing
    /// left to right.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for j in 0..self.resolution {
            let row: Vec<String> = (0..self.resolution)
                .map(|i| format!("{}", self.values[[i, j]]))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn select(fwd: Option<f64>, bwd: Option<f64>, role: Role) -> f64 {
    match (fwd, bwd) {
        (Some(f), Some(b)) => match role {
            Role::Pursuer => {
                if f >= 0.0 {
                    b
                } else {
                    f
                }
            }
            Role::Evader => {
                if f >= 0.0 {
                    f
                } else {
                    b
                }
            }
        },
        (Some(f), None) => f,
        (None, Some(b)) => b,
        (None, None) => 0.0,
    }
}

/// Role-selected upwind gradient `(V_x, V_y)` at node `(i, j)`.
///
/// Pursuers take the backward difference when the forward one is
/// non-negative and the forward one otherwise; evaders mirror the choice.
/// Boundary nodes use whichever one-sided difference exists.
pub fn upwind_gradient(grid: &ValueGrid, cell: (usize, usize), role: Role) -> (f64, f64) {
    let (i, j) = cell;
    let (fx, bx) = grid.diffs_x(i, j);
    let (fy, by) = grid.diffs_y(i, j);
    (select(fx, bx, role), select(fy, by, role))
}

/// Squared upwind gradient component (Godunov) for values that are being
/// pushed down (`decreasing`) or up. Missing neighbors contribute nothing.
fn godunov_norm(fwd: Option<f64>, bwd: Option<f64>, decreasing: bool) -> f64 {
    let (f, b) = (fwd.unwrap_or(0.0), bwd.unwrap_or(0.0));
    let (lo, hi) = if decreasing {
        (b.max(0.0), f.min(0.0))
    } else {
        (b.min(0.0), f.max(0.0))
    };
    (lo * lo).max(hi * hi)
}

/// Courant number `dt * max(v_P, v_E) / dx`.
pub fn courant_number(grid: &ValueGrid, dt: f64, v_p: f64, v_e: f64) -> f64 {
    dt * v_p.max(v_e) / grid.spacing()
}

/// One explicit step of `V[k+1] = V[k] - dt * H` with
/// `H = v_P |grad V|_P - v_E |grad V|_E`: the minimizing pursuer pushes
/// values down, the maximizing evader pushes them up.
///
/// Each term uses the upwind one-sided differences of its own role. Away
/// from extrema these are exactly the differences picked by
/// [`upwind_gradient`]; at a local extremum the term whose information
/// would flow out of the node contributes nothing, which keeps the update
/// monotone.
pub fn hji_update(grid: &ValueGrid, dt: f64, v_p: f64, v_e: f64) -> Result<ValueGrid, ControlError> {
    if !(dt > 0.0) || v_p < 0.0 || v_e < 0.0 {
        return Err(ControlError::InvalidGrid(format!(
            "need dt > 0 and non-negative speeds (dt = {dt}, v_P = {v_p}, v_E = {v_e})"
        )));
    }
    let cfl = courant_number(grid, dt, v_p, v_e);
    if cfl > 1.0 + 1e-12 {
        return Err(ControlError::CflViolation(cfl));
    }
    let n = grid.resolution;
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let (fx, bx) = grid.diffs_x(i, j);
        let (fy, by) = grid.diffs_y(i, j);
        let down = (godunov_norm(fx, bx, true) + godunov_norm(fy, by, true)).sqrt();
        let up = (godunov_norm(fx, bx, false) + godunov_norm(fy, by, false)).sqrt();
        let hamiltonian = v_p * down - v_e * up;
        grid.values[[i, j]] - dt * hamiltonian
    });
    Ok(ValueGrid {
        resolution: n,
        spacing: grid.spacing,
        values,
    })
}
