//! Independent reference implementations used as test oracles. Deliberately
//! naive; none of them share code with the library.
#![allow(dead_code)]

/// `a` dominates `b` in minimization sense.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
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

/// Indices of points not dominated by any other point, by all-pairs check.
pub fn brute_front(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| j != i && dominates(&points[j], &points[i])))
        .collect()
}

/// Minimum assignment cost over every permutation (rows -> columns).
pub fn brute_assignment(cost: &[Vec<f64>]) -> f64 {
    fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for c in 0..cost.len() {
            if !used[c] {
                used[c] = true;
                rec(cost, row + 1, used, acc + cost[row][c], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(cost, 0, &mut vec![false; cost.len()], 0.0, &mut best);
    best
}

/// Exact hypervolume by coordinate compression: every grid cell spanned by
/// the distinct coordinates is counted when some point dominates it.
pub fn grid_hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let dim = reference.len();
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut v: Vec<f64> = points.iter().map(|p| p[k]).collect();
            v.push(reference[k]);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let sizes: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
    let total: usize = sizes.iter().product();
    let mut volume = 0.0;
    for flat in 0..total {
        let mut rem = flat;
        let mut lower = vec![0.0; dim];
        let mut cell = 1.0;
        for k in 0..dim {
            let idx = rem % sizes[k];
            rem /= sizes[k];
            lower[k] = axes[k][idx];
            cell *= axes[k][idx + 1] - axes[k][idx];
        }
        if points.iter().any(|p| p.iter().zip(&lower).all(|(a, b)| a <= b)) {
            volume += cell;
        }
    }
    volume
}

/// Monte Carlo estimate over the box `[lo, reference]` with a tiny LCG so the
/// oracle does not depend on the library's RNG plumbing.
pub fn monte_carlo_hypervolume(points: &[Vec<f64>], lo: &[f64], reference: &[f64], samples: usize, seed: u64) -> f64 {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let box_volume: f64 = lo.iter().zip(reference).map(|(a, b)| b - a).product();
    let mut hits = 0usize;
    let mut z = vec![0.0; reference.len()];
    for _ in 0..samples {
        for k in 0..z.len() {
            z[k] = lo[k] + next() * (reference[k] - lo[k]);
        }
        if points.iter().any(|p| p.iter().zip(&z).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    box_volume * hits as f64 / samples as f64
}

pub type P2 = (f64, f64);

fn circumcircle_contains(t: [P2; 3], p: P2) -> bool {
    let [a, b, c] = t;
    let (ax, ay) = (a.0 - p.0, a.1 - p.1);
    let (bx, by) = (b.0 - p.0, b.1 - p.1);
    let (cx, cy) = (c.0 - p.0, c.1 - p.1);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    let orient = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    if orient > 0.0 {
        det > 0.0
    } else {
        det < 0.0
    }
}

/// Bowyer-Watson triangulation; returns triangles as point-index triples.
pub fn delaunay(points: &[P2]) -> Vec<[usize; 3]> {
    let n = points.len();
    let mut pts = points.to_vec();
    let big = 1e4;
    pts.push((-big, -big));
    pts.push((big, -big));
    pts.push((0.0, big));
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    for i in 0..n {
        let p = pts[i];
        let (bad, good): (Vec<[usize; 3]>, Vec<[usize; 3]>) = tris
            .into_iter()
            .partition(|t| circumcircle_contains([pts[t[0]], pts[t[1]], pts[t[2]]], p));
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for t in &bad {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                if let Some(pos) = edges.iter().position(|e| *e == key) {
                    edges.remove(pos);
                } else {
                    edges.push(key);
                }
            }
        }
        tris = good;
        for (a, b) in edges {
            tris.push([a, b, i]);
        }
    }
    tris.into_iter().filter(|t| t.iter().all(|&v| v < n)).collect()
}

/// Whether `q` falls in any triangle of the triangulation (closed triangles).
pub fn in_triangulation(points: &[P2], tris: &[[usize; 3]], q: P2) -> bool {
    tris.iter().any(|t| {
        let [a, b, c] = [points[t[0]], points[t[1]], points[t[2]]];
        let s = |u: P2, v: P2| (v.0 - u.0) * (q.1 - u.1) - (v.1 - u.1) * (q.0 - u.0);
        let (d1, d2, d3) = (s(a, b), s(b, c), s(c, a));
        let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
        let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
        !(neg && pos)
    })
}

/// Log-rank chi-square built from an explicit per-time contingency table.
pub fn log_rank_table(a: &[(f64, bool)], b: &[(f64, bool)]) -> f64 {
    let mut times: Vec<f64> = a.iter().chain(b).filter(|o| o.1).map(|o| o.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut o, mut e, mut v) = (0.0, 0.0, 0.0);
    for t in times {
        let na = a.iter().filter(|x| x.0 >= t).count() as f64;
        let nb = b.iter().filter(|x| x.0 >= t).count() as f64;
        let da = a.iter().filter(|x| x.0 == t && x.1).count() as f64;
        let db = b.iter().filter(|x| x.0 == t && x.1).count() as f64;
        let (n, d) = (na + nb, da + db);
        o += da;
        e += d * na / n;
        if n > 1.0 {
            v += d * (na / n) * (nb / n) * (n - d) / (n - 1.0);
        }
    }
    (o - e) * (o - e) / v
}
