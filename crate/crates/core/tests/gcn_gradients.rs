use hotstart_core::gcn::train::{graph_loss, graph_loss_and_grad, GameTarget};
use hotstart_core::gcn::GcnModel;
use hotstart_core::gfs::{aggregate_features, build_graph, evader_samples, per_pursuer_features};
use hotstart_core::sim::{AgentState, Configuration, GameType};
use hotstart_core::Vec2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn three_node_case() -> (hotstart_core::gfs::ConfigGraph, GameTarget) {
    let gt = GameType::new(3, 2).unwrap();
    let samples = evader_samples(2, 6, 11);
    let cfg = Configuration {
        pursuers: vec![
            AgentState::new(Vec2::new(0.3, -0.2), Vec2::new(0.2, 0.5)),
            AgentState::new(Vec2::new(-0.6, 0.4), Vec2::new(-0.3, 0.1)),
            AgentState::new(Vec2::new(0.1, 0.7), Vec2::new(0.4, -0.4)),
        ],
        capture_radius: 0.1,
        game_type: gt,
    };
    let feats = per_pursuer_features(&cfg, &samples).unwrap();
    let graph = build_graph(&cfg, &feats, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    // a small front away from the generated point so the argmin is stable
    let mut other = cfg.clone();
    other.pursuers[0].position = Vec2::new(0.8, 0.8);
    let front = vec![aggregate_features(&cfg, &samples).unwrap(), aggregate_features(&other, &samples).unwrap()];
    (graph, GameTarget { front, evader_samples: samples })
}

#[test]
fn parameter_gradients_match_central_differences() {
    let (graph, target) = three_node_case();
    let model = GcnModel::new(21);
    let (_, grads) = graph_loss_and_grad(&model, &graph, &target).unwrap();
    let h = 1e-5;
    let loss = |m: &GcnModel| graph_loss(m, &graph, &target).unwrap().loss;

    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for l in 0..model.weights.len() {
        let (rows, cols) = model.weights[l].dim();
        for r in 0..rows {
            for c in 0..cols {
                let mut plus = model.clone();
                plus.weights[l][[r, c]] += h;
                let mut minus = model.clone();
                minus.weights[l][[r, c]] -= h;
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let an = grads.weights[l][[r, c]];
                let err = (fd - an).abs() / (fd.abs().max(an.abs()).max(1e-6));
                worst = worst.max(err);
                assert!(err < 1e-4, "layer {l} weight ({r},{c}): analytic {an} fd {fd}");
                checked += 1;
            }
        }
        for k in 0..model.biases[l].len() {
            let mut plus = model.clone();
            plus.biases[l][k] += h;
            let mut minus = model.clone();
            minus.biases[l][k] -= h;
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let an = grads.biases[l][k];
            let err = (fd - an).abs() / (fd.abs().max(an.abs()).max(1e-6));
            worst = worst.max(err);
            assert!(err < 1e-4, "layer {l} bias {k}: analytic {an} fd {fd}");
            checked += 1;
        }
    }
    assert_eq!(checked, model.n_parameters());
    eprintln!("worst relative error {worst:.2e} over {checked} parameters");
}
