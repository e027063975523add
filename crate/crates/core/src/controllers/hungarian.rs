//! Minimum-cost pursuer-to-evader assignment.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::ControlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Evader index chased by each pursuer (row). Always `Some` once at
    /// least one evader exists.
    pub targets: Vec<Option<usize>>,
    /// Cost of the optimal one-to-one matching alone.
    pub matching_cost: f64,
    /// Sum of cost entries over every assigned (pursuer, evader) pair,
    /// surplus pursuers included.
    pub total_cost: f64,
}

/// Solve the square assignment problem by shortest augmenting paths with
/// potentials. Returns the column matched to each row.
fn solve_square(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    // 1-indexed potentials; column 0 is the virtual source
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        matched_row[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = matched_row[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[[r - 1, col - 1]] - u[r] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[matched_row[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if matched_row[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            matched_row[col0] = matched_row[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for col in 1..=n {
        row_to_col[matched_row[col] - 1] = col - 1;
    }
    row_to_col
}

/// Minimum-cost matching of pursuers (rows) to evaders (columns).
///
/// Rectangular matrices are padded to square with a sentinel above every
/// real entry. When pursuers outnumber evaders, the pursuers left over after
/// the matching chase their individually cheapest evader (lowest index on
/// ties).
pub fn hungarian_assign(cost: &Array2<f64>) -> Result<Assignment, ControlError> {
    let (rows, cols) = cost.dim();
    if cost.iter().any(|c| c.is_nan()) {
        return Err(ControlError::InvalidCost("NaN entry".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(ControlError::InvalidCost("infinite entry".into()));
    }
    if cols == 0 {
        return Err(ControlError::NoEvaders);
    }
    if rows == 0 {
        return Ok(Assignment {
            targets: Vec::new(),
            matching_cost: 0.0,
            total_cost: 0.0,
        });
    }

    let n = rows.max(cols);
    let max_entry = cost.iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c));
    let sentinel = max_entry.abs() + 1.0;
    let square = Array2::from_shape_fn((n, n), |(r, c)| {
        if r < rows && c < cols {
            cost[[r, c]]
        } else {
            sentinel
        }
    });
    let row_to_col = solve_square(&square);

    let mut targets = vec![None; rows];
    let mut matching_cost = 0.0;
    for (r, target) in targets.iter_mut().enumerate() {
        let c = row_to_col[r];
        if c < cols {
            *target = Some(c);
            matching_cost += cost[[r, c]];
        }
    }
    let mut total_cost = matching_cost;
    for (r, target) in targets.iter_mut().enumerate() {
        if target.is_none() {
            let (best, c) = (0..cols)
                .map(|c| (c, cost[[r, c]]))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            *target = Some(best);
            total_cost += c;
        }
    }

    Ok(Assignment {
        targets,
        matching_cost,
        total_cost,
    })
}
