//! Dominance, non-dominated sorting and Pareto fronts.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::sim::{Configuration, GameType};

use super::features::FeatureVector;
use super::GfsError;

/// `a` dominates `b` in minimization sense: no worse everywhere, strictly
/// better somewhere.
pub fn dominates_objectives(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Dominance between feature vectors, compared on their objectives.
pub fn dominates(a: &FeatureVector, b: &FeatureVector) -> bool {
    dominates_objectives(&a.objectives(), &b.objectives())
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Indices of the non-dominated points, ascending.
///
/// Points are visited in lexicographic order, so any dominator of a point is
/// visited before it; each point is compared only against the survivors.
pub fn nondominated_indices(points: &[[f64; 3]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&k| dominates_objectives(&points[k], &points[i])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Fronts of the non-dominated sort, best first. Indices within a front are
/// ascending.
pub fn non_dominated_sort(points: &[[f64; 3]]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_objectives(&points[i], &points[j]) {
                dominated_by[i].push(j);
                count[j] += 1;
            } else if dominates_objectives(&points[j], &points[i]) {
                dominated_by[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front (same order as `front`).
/// Boundary points get infinity.
pub fn crowding_distance(points: &[[f64; 3]], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for k in 0..3 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| points[front[a]][k].total_cmp(&points[front[b]][k]).then(a.cmp(&b)));
        let lo = points[front[order[0]]][k];
        let hi = points[front[order[m - 1]]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..(m - 1) {
            let gap = points[front[order[w + 1]]][k] - points[front[order[w - 1]]][k];
            dist[order[w]] += gap / span;
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub config: Configuration,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub game_type: GameType,
    pub members: Vec<FrontMember>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn feature_points(&self) -> Vec<[f64; 3]> {
        self.members.iter().map(|m| m.features.as_array()).collect()
    }

    pub fn unit_objective_points(&self) -> Vec<[f64; 3]> {
        self.members.iter().map(|m| m.features.unit_objectives()).collect()
    }

    /// True when no member dominates another.
    pub fn is_mutually_nondominated(&self) -> bool {
        self.members.iter().enumerate().all(|(i, a)| {
            self.members
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !dominates(&b.features, &a.features))
        })
    }

    pub fn to_json(&self) -> Result<String, GfsError> {
        serde_json::to_string_pretty(self).map_err(|e| GfsError::Serde(e.to_string()))
    }

    /// Parse a stored front and re-check that no member dominates another.
    pub fn from_json(s: &str) -> Result<Self, GfsError> {
        let front: Self = serde_json::from_str(s).map_err(|e| GfsError::Serde(e.to_string()))?;
        if !front.is_mutually_nondominated() {
            return Err(GfsError::Serde("stored front has a dominated member".into()));
        }
        Ok(front)
    }

    /// One row per member: game type, member index, the three features, then
    /// `x, y, vx, vy` of every pursuer.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "game_type,member,capture,distance,heading")?;
        for i in 0..self.game_type.n_pursuers {
            write!(w, ",p{i}_x,p{i}_y,p{i}_vx,p{i}_vy")?;
        }
        writeln!(w)?;
        for (k, m) in self.members.iter().enumerate() {
            write!(
                w,
                "{},{},{},{},{}",
                self.game_type, k, m.features.capture, m.features.distance, m.features.heading
            )?;
            for p in &m.config.pursuers {
                write!(
                    w,
                    ",{},{},{},{}",
                    p.position.x, p.position.y, p.velocity.x, p.velocity.y
                )?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// The non-dominated members of `population`, in input order.
pub fn pareto_front(population: &[(Configuration, FeatureVector)]) -> Result<ParetoFront, GfsError> {
    let first = population.first().ok_or(GfsError::EmptyPopulation)?;
    let points: Vec<[f64; 3]> = population.iter().map(|(_, f)| f.objectives()).collect();
    let members = nondominated_indices(&points)
        .into_iter()
        .map(|i| FrontMember {
            config: population[i].0.clone(),
            features: population[i].1,
        })
        .collect();
    Ok(ParetoFront {
        game_type: first.0.game_type,
        members,
    })
}
