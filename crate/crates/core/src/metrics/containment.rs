//! Convex hull of the pursuer team and evader containment.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

/// Orientation tolerance for boundary and collinearity tests.
const ORIENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub inside: bool,
    pub hull_area: f64,
    /// Fewer than three pursuers or all of them collinear.
    pub degenerate: bool,
}

fn orient(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a - o).cross(b - o)
}

/// Counter-clockwise convex hull by Andrew's monotone chain; collinear
/// boundary points are dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= ORIENT_EPS
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..poly.len())
        .map(|i| poly[i].cross(poly[(i + 1) % poly.len()]))
        .sum();
    0.5 * twice.abs()
}

/// Whether the evader lies in the pursuers' convex hull (boundary counts as
/// inside), and the hull area.
pub fn containment(pursuers: &[Vec2], evader: Vec2) -> Containment {
    let hull = convex_hull(pursuers);
    if hull.len() < 3 {
        return Containment {
            inside: false,
            hull_area: 0.0,
            degenerate: true,
        };
    }
    let inside = (0..hull.len()).all(|i| orient(hull[i], hull[(i + 1) % hull.len()], evader) >= -ORIENT_EPS);
    Containment {
        inside,
        hull_area: polygon_area(&hull),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec2> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn unit_square() {
        let c = containment(&square(), Vec2::new(0.5, 0.5));
        assert!(c.inside && !c.degenerate);
        assert!((c.hull_area - 1.0).abs() < 1e-15);
        let c = containment(&square(), Vec2::new(2.0, 2.0));
        assert!(!c.inside);
        assert!((c.hull_area - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_is_inside() {
        assert!(containment(&square(), Vec2::new(1.0, 0.5)).inside);
        assert!(containment(&square(), Vec2::new(0.0, 0.0)).inside);
    }

    #[test]
    fn degenerate_inputs() {
        let c = containment(&[Vec2::ZERO, Vec2::new(1.0, 0.0)], Vec2::ZERO);
        assert!(c.degenerate && !c.inside && c.hull_area == 0.0);
        let line = [Vec2::ZERO, Vec2::new(0.5, 0.5), Vec2::new(1.0, 1.0)];
        let c = containment(&line, Vec2::new(0.5, 0.5));
        assert!(c.degenerate && !c.inside);
    }

    #[test]
    fn interior_point_dropped_from_hull() {
        let mut pts = square();
        pts.push(Vec2::new(0.5, 0.5));
        pts.push(Vec2::new(0.5, 0.0));
        assert_eq!(convex_hull(&pts).len(), 4);
    }
}
