mod oracles;

use hotstart_core::controllers::hungarian_assign;
use hotstart_core::gcn::nearest_front_point;
use hotstart_core::gfs::pareto::nondominated_indices;
use hotstart_core::gfs::FeatureVector;
use hotstart_core::metrics::{containment, hypervolume, log_rank, Observation};
use hotstart_core::Vec2;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn hungarian_matches_enumeration_up_to_six() {
    let mut r = rng(1);
    for n in [5usize, 6] {
        for _ in 0..20 {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| r.random_range(0..50) as f64).collect())
                .collect();
            let m = Array2::from_shape_fn((n, n), |(i, j)| rows[i][j]);
            let a = hungarian_assign(&m).unwrap();
            assert_eq!(a.total_cost, oracles::brute_assignment(&rows));
            let mut cols: Vec<usize> = a.targets.iter().map(|t| t.unwrap()).collect();
            cols.sort();
            assert_eq!(cols, (0..n).collect::<Vec<_>>());
        }
    }
}

#[test]
fn front_of_random_vectors_matches_pairwise_check() {
    let mut r = rng(2);
    for trial in 0..10 {
        let n = if trial == 0 { 500 } else { 100 };
        // a coarse lattice forces plenty of ties
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [0; 3].map(|_: i32| (r.random_range(0..12) as f64) / 11.0))
            .collect();
        let mut ours = nondominated_indices(&pts);
        ours.sort();
        let as_vec: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        assert_eq!(ours, oracles::brute_front(&as_vec));
    }
}

#[test]
fn nearest_front_point_matches_linear_scan() {
    let mut r = rng(3);
    let simplex = |r: &mut ChaCha8Rng| {
        let raw = [r.random::<f64>() + 1e-3, r.random::<f64>() + 1e-3, r.random::<f64>() + 1e-3];
        FeatureVector::from_raw(raw).unwrap()
    };
    for _ in 0..50 {
        let front: Vec<FeatureVector> = (0..50).map(|_| simplex(&mut r)).collect();
        let y = simplex(&mut r);
        let (idx, d) = nearest_front_point(&y, &front).unwrap();
        let mut best = f64::INFINITY;
        for f in &front {
            let s = (y.capture - f.capture).powi(2) + (y.distance - f.distance).powi(2) + (y.heading - f.heading).powi(2);
            best = best.min(s.sqrt());
        }
        assert!((d - best).abs() < 1e-15);
        assert!((y.distance_to(&front[idx]) - best).abs() < 1e-15);
    }
}

#[test]
fn hypervolume_3d_matches_grid_oracle() {
    let mut r = rng(4);
    for _ in 0..20 {
        let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect();
        let hv = hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap();
        let oracle = oracles::grid_hypervolume(&pts, &[1.0, 1.0, 1.0]);
        assert!((hv - oracle).abs() < 1e-12, "{hv} vs {oracle}");
    }
}

#[test]
fn hypervolume_3d_matches_monte_carlo() {
    let mut r = rng(5);
    for seed in 0..3 {
        // points near a curved front so the dominated region is non-trivial
        let pts: Vec<Vec<f64>> = (0..15)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| r.random::<f64>()).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| 0.9 * x / n).collect()
            })
            .collect();
        let hv = hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap();
        let mc = oracles::monte_carlo_hypervolume(&pts, &[0.0; 3], &[1.0; 3], 1_000_000, seed);
        assert!((hv - mc).abs() / hv < 0.01, "{hv} vs {mc}");
    }
}

#[test]
fn containment_matches_delaunay_point_location() {
    let mut r = rng(6);
    for _ in 0..20 {
        let ps: Vec<Vec2> = (0..5)
            .map(|_| Vec2::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let pts: Vec<(f64, f64)> = ps.iter().map(|p| (p.x, p.y)).collect();
        let tris = oracles::delaunay(&pts);
        for _ in 0..100 {
            let e = Vec2::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let c = containment(&ps, e);
            assert_eq!(c.inside, oracles::in_triangulation(&pts, &tris, (e.x, e.y)));
        }
    }
}

#[test]
fn log_rank_all_captured_vs_none() {
    let a: Vec<Observation> = (0..20).map(|_| Observation::captured(1.0)).collect();
    let b: Vec<Observation> = (0..20).map(|_| Observation::censored(40.0)).collect();
    let lr = log_rank(&a, &b).unwrap();
    // single event time: n = 40, d = 20, n_A = n_B = 20
    // O - E = 20 - 10, V = 20 * 0.5 * 0.5 * 20 / 39
    let expected = 100.0 / (20.0 * 0.25 * 20.0 / 39.0);
    assert!((lr.chi_square - expected).abs() < 1e-9);
    assert!(lr.p_value < 0.001);
}

#[test]
fn log_rank_textbook_table() {
    // A: events at 1 and 3, censored at 4; B: events at 2, 3 and 5.
    //   t  nA nB  d  dA   E_A   V
    //   1   3  3  1   1   0.5  0.25
    //   2   2  3  1   0   0.4  0.24
    //   3   2  2  2   1   1.0  1/3
    //   5   0  1  1   0   0    0
    let a = [Observation::captured(1.0), Observation::captured(3.0), Observation::censored(4.0)];
    let b = [Observation::captured(2.0), Observation::captured(3.0), Observation::captured(5.0)];
    let expected = 0.01 / (0.25 + 0.24 + 1.0 / 3.0);
    let lr = log_rank(&a, &b).unwrap();
    assert!((lr.chi_square - expected).abs() < 1e-6);
    assert!((lr.observed_a - 2.0).abs() < 1e-12);
    assert!((lr.expected_a - 1.9).abs() < 1e-12);
    let to_pairs = |g: &[Observation]| g.iter().map(|o| (o.time, o.captured)).collect::<Vec<_>>();
    assert!((oracles::log_rank_table(&to_pairs(&a), &to_pairs(&b)) - expected).abs() < 1e-12);
}

#[test]
fn log_rank_random_groups_match_table_oracle() {
    let mut r = rng(7);
    for _ in 0..20 {
        let mut group = |n: usize| -> Vec<Observation> {
            (0..n)
                .map(|_| {
                    let t = r.random_range(0..=40) as f64;
                    if t < 40.0 && r.random::<f64>() < 0.7 {
                        Observation::captured(t)
                    } else {
                        Observation::censored(t)
                    }
                })
                .collect()
        };
        let (a, b) = (group(30), group(25));
        let lr = log_rank(&a, &b).unwrap();
        let pairs = |g: &[Observation]| g.iter().map(|o| (o.time, o.captured)).collect::<Vec<_>>();
        let oracle = oracles::log_rank_table(&pairs(&a), &pairs(&b));
        assert!((lr.chi_square - oracle).abs() < 1e-9);
    }
}
