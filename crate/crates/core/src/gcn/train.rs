//! Mini-batch training of the GCN against per-game-type Pareto fronts.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::gfs::graph::col;
use crate::gfs::{default_evader_samples, ConfigGraph, FeatureVector, ParetoFront};
use crate::metrics::IndicatorReport;
use crate::sim::GameType;

use super::loss::{loss_and_grad, LossEval};
use super::model::{FeatureRanges, GcnModel, Gradients};
use super::GcnError;

/// Hypervolume reference in the unit-mapped objective space.
pub const HV_REFERENCE: [f64; 3] = [1.0, 1.0, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 1024,
            learning_rate: 1e-4,
            weight_decay: 1e-2,
            epochs: 150,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    /// Small-dataset preset: more optimizer steps per epoch on a few hundred
    /// graphs.
    pub fn desk() -> Self {
        Self {
            batch_size: 16,
            learning_rate: 1e-3,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GcnError> {
        let bad = |m: &str| Err(GcnError::Config(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch size must be >= 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1");
        }
        if !(self.learning_rate >= 0.0 && self.weight_decay >= 0.0) {
            return bad("learning rate and weight decay must be non-negative");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.adam_eps > 0.0) {
            return bad("invalid Adam constants");
        }
        Ok(())
    }
}

/// Adam with decoupled weight decay.
#[derive(Debug, Clone)]
pub struct AdamW {
    m: Gradients,
    v: Gradients,
    t: i32,
}

impl AdamW {
    pub fn new(model: &GcnModel) -> Self {
        Self {
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
            t: 0,
        }
    }

    pub fn step(&mut self, model: &mut GcnModel, grads: &Gradients, cfg: &TrainConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let step = (*m / c1) / ((*v / c2).sqrt() + cfg.adam_eps);
            *p -= cfg.learning_rate * (step + cfg.weight_decay * *p);
        };
        for l in 0..model.weights.len() {
            ndarray::Zip::from(&mut model.weights[l])
                .and(&grads.weights[l])
                .and(&mut self.m.weights[l])
                .and(&mut self.v.weights[l])
                .for_each(|p, &g, m, v| update(p, g, m, v));
            ndarray::Zip::from(&mut model.biases[l])
                .and(&grads.biases[l])
                .and(&mut self.m.biases[l])
                .and(&mut self.v.biases[l])
                .for_each(|p, &g, m, v| update(p, g, m, v));
        }
    }
}

/// What a graph is scored against.
#[derive(Debug, Clone)]
pub struct GameTarget {
    pub front: Vec<FeatureVector>,
    pub evader_samples: Vec<Vec<Vec2>>,
}

impl GameTarget {
    pub fn from_front(front: &ParetoFront, evader_samples: Vec<Vec<Vec2>>) -> Self {
        Self {
            front: front.members.iter().map(|m| m.features).collect(),
            evader_samples,
        }
    }
}

pub type Targets = BTreeMap<GameType, GameTarget>;

/// Targets using each game type's default evader samples.
pub fn default_targets(fronts: &[ParetoFront]) -> Targets {
    fronts
        .iter()
        .map(|f| (f.game_type, GameTarget::from_front(f, default_evader_samples(f.game_type))))
        .collect()
}

fn graph_radius(graph: &ConfigGraph) -> f64 {
    graph.features[[0, col::RADIUS]]
}

fn rows_to_positions(out: &Array2<f64>) -> Vec<Vec2> {
    out.outer_iter().map(|r| Vec2::new(r[0], r[1])).collect()
}

/// Loss of one graph and the parameter gradient.
pub fn graph_loss_and_grad(
    model: &GcnModel,
    graph: &ConfigGraph,
    target: &GameTarget,
) -> Result<(LossEval, Gradients), GcnError> {
    let cache = model.forward_cached(&graph.features, &graph.adjacency())?;
    let positions = rows_to_positions(&cache.output);
    let eval = loss_and_grad(&positions, &target.evader_samples, graph_radius(graph), &target.front)?;
    let d_out = Array2::from_shape_fn(cache.output.dim(), |(i, k)| {
        if k == 0 {
            eval.d_positions[i].x
        } else {
            eval.d_positions[i].y
        }
    });
    let grads = model.backward(&cache, &d_out);
    Ok((eval, grads))
}

/// Loss of one graph without gradients.
pub fn graph_loss(model: &GcnModel, graph: &ConfigGraph, target: &GameTarget) -> Result<LossEval, GcnError> {
    let out = model.forward(graph)?;
    loss_and_grad(&rows_to_positions(&out), &target.evader_samples, graph_radius(graph), &target.front)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Mean Pareto loss over the dataset.
    pub loss: f64,
    pub indicators: IndicatorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean per-graph loss seen during each epoch (before each batch's
    /// update).
    pub loss_trace: Vec<f64>,
    /// Evaluation before training (epoch 0) and after every epoch.
    pub metrics: Vec<EpochMetrics>,
}

fn lookup<'a>(targets: &'a Targets, g: &ConfigGraph) -> Result<&'a GameTarget, GcnError> {
    targets.get(&g.game_type).ok_or(GcnError::MissingFront(g.game_type))
}

/// Forward every graph and score the generated features against the
/// stacked fronts.
pub fn evaluate_dataset(
    model: &GcnModel,
    graphs: &[ConfigGraph],
    targets: &Targets,
    epoch: usize,
) -> Result<EpochMetrics, GcnError> {
    let evals: Vec<LossEval> = graphs
        .par_iter()
        .map(|g| graph_loss(model, g, lookup(targets, g)?))
        .collect::<Result<_, _>>()?;
    let loss = evals.iter().map(|e| e.loss).sum::<f64>() / evals.len() as f64;
    let generated: Vec<Vec<f64>> = evals.iter().map(|e| e.features.unit_objectives().to_vec()).collect();
    let stacked: Vec<Vec<f64>> = targets
        .values()
        .flat_map(|t| t.front.iter().map(|f| f.unit_objectives().to_vec()))
        .collect();
    let indicators = IndicatorReport::compute(&generated, &stacked, &HV_REFERENCE)
        .map_err(|e| GcnError::Metrics(e.to_string()))?;
    Ok(EpochMetrics {
        epoch,
        loss,
        indicators,
    })
}

/// Stateful trainer; [`train`] runs it to completion.
pub struct Trainer<'a> {
    pub model: GcnModel,
    cfg: TrainConfig,
    graphs: &'a [ConfigGraph],
    targets: &'a Targets,
    opt: AdamW,
    rng: ChaCha8Rng,
    epoch: usize,
}

impl<'a> Trainer<'a> {
    pub fn new(graphs: &'a [ConfigGraph], targets: &'a Targets, cfg: TrainConfig) -> Result<Self, GcnError> {
        cfg.validate()?;
        if graphs.is_empty() {
            return Err(GcnError::EmptyDataset);
        }
        for g in graphs {
            let t = lookup(targets, g)?;
            if t.front.is_empty() {
                return Err(GcnError::EmptyFront);
            }
        }
        let mut model = GcnModel::new(cfg.seed);
        model.input_ranges = FeatureRanges::from_graphs(graphs);
        let opt = AdamW::new(&model);
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
        Ok(Self {
            model,
            cfg,
            graphs,
            targets,
            opt,
            rng,
            epoch: 0,
        })
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// One pass over the shuffled dataset; returns the mean loss seen.
    pub fn run_epoch(&mut self) -> Result<f64, GcnError> {
        let mut order: Vec<usize> = (0..self.graphs.len()).collect();
        order.shuffle(&mut self.rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(self.cfg.batch_size) {
            let model = &self.model;
            let results: Vec<(LossEval, Gradients)> = batch
                .par_iter()
                .map(|&i| {
                    let g = &self.graphs[i];
                    graph_loss_and_grad(model, g, lookup(self.targets, g)?)
                })
                .collect::<Result<_, _>>()?;
            let mut total = Gradients::zeros_like(model);
            for (eval, grads) in &results {
                loss_sum += eval.loss;
                total.add_assign(grads);
            }
            total.scale(1.0 / batch.len() as f64);
            self.opt.step(&mut self.model, &total, &self.cfg);
        }
        self.epoch += 1;
        if self.model.validate().is_err() {
            return Err(GcnError::NonFinite);
        }
        Ok(loss_sum / self.graphs.len() as f64)
    }
}

/// Train a fresh model. Deterministic given the config seed and the order of
/// `graphs`.
pub fn train(graphs: &[ConfigGraph], targets: &Targets, cfg: &TrainConfig) -> Result<(GcnModel, TrainReport), GcnError> {
    let mut trainer = Trainer::new(graphs, targets, cfg.clone())?;
    let mut report = TrainReport {
        loss_trace: Vec::with_capacity(cfg.epochs),
        metrics: vec![evaluate_dataset(&trainer.model, graphs, targets, 0)?],
    };
    for epoch in 1..=cfg.epochs {
        report.loss_trace.push(trainer.run_epoch()?);
        report.metrics.push(evaluate_dataset(&trainer.model, graphs, targets, epoch)?);
    }
    Ok((trainer.model, report))
}
