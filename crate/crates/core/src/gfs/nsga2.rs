//! NSGA-II search over continuous pursuer placements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Vec2, WORLD_MAX, WORLD_MIN};
use crate::sim::{AgentState, Configuration, GameType, Scenario};

use super::features::{aggregate_features, FeatureVector};
use super::pareto::{crowding_distance, non_dominated_sort, FrontMember, ParetoFront};
use super::GfsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Nsga2Params {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    /// Per-gene mutation probability; `None` means `1 / genome length`.
    pub mutation_prob: Option<f64>,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Self {
            population_size: 500,
            generations: 200,
            crossover_prob: 0.9,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
            mutation_prob: None,
        }
    }
}

impl Nsga2Params {
    pub fn validate(&self) -> Result<(), GfsError> {
        let bad = |m: String| Err(GfsError::InvalidParams(m));
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return bad(format!(
                "population size must be even and >= 4, got {}",
                self.population_size
            ));
        }
        if self.generations == 0 {
            return bad("generations must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad(format!("crossover probability {} outside [0, 1]", self.crossover_prob));
        }
        if !(self.eta_crossover >= 0.0 && self.eta_mutation >= 0.0) {
            return bad("distribution indices must be non-negative".into());
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("mutation probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// What is being optimized: placements for one game type, scored against a
/// fixed set of evader scenarios.
#[derive(Debug, Clone)]
pub struct PlacementProblem {
    pub game_type: GameType,
    pub evader_samples: Vec<Vec<Vec2>>,
    pub capture_radius: f64,
    pub speed_cap: f64,
}

impl PlacementProblem {
    /// Capture radius and pursuer speed taken from the game type's default
    /// scenario.
    pub fn new(game_type: GameType, evader_samples: Vec<Vec<Vec2>>) -> Self {
        let sc = Scenario::for_game_type(game_type);
        Self {
            game_type,
            evader_samples,
            capture_radius: sc.capture_radius,
            speed_cap: sc.pursuer_speed,
        }
    }

    pub fn genome_len(&self) -> usize {
        4 * self.game_type.n_pursuers
    }

    fn bounds(&self, gene: usize) -> (f64, f64) {
        if gene % 4 < 2 {
            (WORLD_MIN, WORLD_MAX)
        } else {
            (-self.speed_cap, self.speed_cap)
        }
    }

    /// Genome `[x, y, vx, vy]` per pursuer; velocities beyond the speed cap
    /// are scaled back onto it.
    pub fn decode(&self, genome: &[f64]) -> Configuration {
        let pursuers = genome
            .chunks_exact(4)
            .map(|g| {
                let mut v = Vec2::new(g[2], g[3]);
                let n = v.norm();
                if n > self.speed_cap {
                    v = v * (self.speed_cap / n);
                }
                AgentState::new(Vec2::new(g[0], g[1]).clamp_to_world(), v)
            })
            .collect();
        Configuration {
            pursuers,
            capture_radius: self.capture_radius,
            game_type: self.game_type,
        }
    }

    pub fn evaluate(&self, genome: &[f64]) -> Result<FeatureVector, GfsError> {
        let f = aggregate_features(&self.decode(genome), &self.evader_samples)?;
        let s = f.capture + f.distance + f.heading;
        assert!((s - 1.0).abs() < 1e-9, "features must sum to one, got {s}");
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub features: FeatureVector,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn objectives(&self) -> [f64; 3] {
        self.features.objectives()
    }
}

pub struct Nsga2 {
    problem: PlacementProblem,
    params: Nsga2Params,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    generation: usize,
}

impl Nsga2 {
    /// Random initial population, evaluated and ranked.
    pub fn new(problem: PlacementProblem, params: Nsga2Params, seed: u64) -> Result<Self, GfsError> {
        params.validate()?;
        problem.game_type.validate().map_err(GfsError::Sim)?;
        if problem.evader_samples.is_empty() || problem.evader_samples.iter().any(Vec::is_empty) {
            return Err(GfsError::NoEvaders);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let genomes: Vec<Vec<f64>> = (0..params.population_size)
            .map(|_| {
                (0..problem.genome_len())
                    .map(|g| {
                        let (lo, hi) = problem.bounds(g);
                        rng.random_range(lo..=hi)
                    })
                    .collect()
            })
            .collect();
        let mut population = evaluate_all(&problem, genomes)?;
        assign_rank_and_crowding(&mut population);
        Ok(Self {
            problem,
            params,
            rng,
            population,
            generation: 0,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn problem(&self) -> &PlacementProblem {
        &self.problem
    }

    /// Produce offspring, merge with the parents and keep the best half.
    pub fn step(&mut self) -> Result<(), GfsError> {
        let children = self.make_offspring();
        let offspring = evaluate_all(&self.problem, children)?;
        let mut merged = std::mem::take(&mut self.population);
        merged.extend(offspring);
        self.population = select_survivors(merged, self.params.population_size);
        self.generation += 1;
        Ok(())
    }

    pub fn run(&mut self) -> Result<(), GfsError> {
        while self.generation < self.params.generations {
            self.step()?;
        }
        Ok(())
    }

    /// Rank-0 members of the current population, in population order.
    pub fn front(&self) -> ParetoFront {
        ParetoFront {
            game_type: self.problem.game_type,
            members: self
                .population
                .iter()
                .filter(|ind| ind.rank == 0)
                .map(|ind| FrontMember {
                    config: self.problem.decode(&ind.genome),
                    features: ind.features,
                })
                .collect(),
        }
    }

    fn tournament(&mut self) -> usize {
        let n = self.population.len();
        let a = self.rng.random_range(0..n);
        let b = self.rng.random_range(0..n);
        let (pa, pb) = (&self.population[a], &self.population[b]);
        if pa.rank != pb.rank {
            if pa.rank < pb.rank { a } else { b }
        } else if pa.crowding != pb.crowding {
            if pa.crowding > pb.crowding { a } else { b }
        } else {
            a.min(b)
        }
    }

    fn make_offspring(&mut self) -> Vec<Vec<f64>> {
        let len = self.problem.genome_len();
        let pm = self.params.mutation_prob.unwrap_or(1.0 / len as f64);
        let mut children = Vec::with_capacity(self.params.population_size);
        while children.len() < self.params.population_size {
            let a = self.tournament();
            let b = self.tournament();
            let mut c1 = self.population[a].genome.clone();
            let mut c2 = self.population[b].genome.clone();
            if self.rng.random::<f64>() < self.params.crossover_prob {
                for g in 0..len {
                    let (lo, hi) = self.problem.bounds(g);
                    let (x1, x2) = sbx_pair(c1[g], c2[g], lo, hi, self.params.eta_crossover, &mut self.rng);
                    c1[g] = x1;
                    c2[g] = x2;
                }
            }
            for c in [&mut c1, &mut c2] {
                for (g, x) in c.iter_mut().enumerate() {
                    if self.rng.random::<f64>() < pm {
                        let (lo, hi) = self.problem.bounds(g);
                        *x = polynomial_mutation(*x, lo, hi, self.params.eta_mutation, &mut self.rng);
                    }
                }
            }
            children.push(c1);
            children.push(c2);
        }
        children.truncate(self.params.population_size);
        children
    }
}

fn evaluate_all(problem: &PlacementProblem, genomes: Vec<Vec<f64>>) -> Result<Vec<Individual>, GfsError> {
    genomes
        .into_par_iter()
        .map(|genome| {
            let features = problem.evaluate(&genome)?;
            Ok(Individual {
                genome,
                features,
                rank: 0,
                crowding: 0.0,
            })
        })
        .collect()
}

fn assign_rank_and_crowding(pop: &mut [Individual]) {
    let points: Vec<[f64; 3]> = pop.iter().map(Individual::objectives).collect();
    for (rank, front) in non_dominated_sort(&points).iter().enumerate() {
        let cd = crowding_distance(&points, front);
        for (k, &i) in front.iter().enumerate() {
            pop[i].rank = rank;
            pop[i].crowding = cd[k];
        }
    }
}

/// Elitist truncation: whole fronts while they fit, then the most spread-out
/// members of the splitting front.
fn select_survivors(mut merged: Vec<Individual>, size: usize) -> Vec<Individual> {
    let points: Vec<[f64; 3]> = merged.iter().map(Individual::objectives).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for (rank, front) in non_dominated_sort(&points).iter().enumerate() {
        let cd = crowding_distance(&points, front);
        for (k, &i) in front.iter().enumerate() {
            merged[i].rank = rank;
            merged[i].crowding = cd[k];
        }
        if chosen.len() + front.len() <= size {
            chosen.extend(front);
        } else {
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(front[a].cmp(&front[b])));
            chosen.extend(order.iter().take(size - chosen.len()).map(|&k| front[k]));
        }
        if chosen.len() == size {
            break;
        }
    }
    chosen.sort_unstable();
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    let mut next: Vec<Individual> = chosen.into_iter().map(|i| slots[i].take().expect("unique")).collect();
    // crowding is recomputed within the surviving population
    assign_rank_and_crowding(&mut next);
    next
}

/// Bounded simulated binary crossover of one gene.
fn sbx_pair(x1: f64, x2: f64, lo: f64, hi: f64, eta: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    if rng.random::<f64>() > 0.5 || (x1 - x2).abs() < 1e-14 {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.random();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    let bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    let c1 = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(lo, hi);
    let c2 = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(lo, hi);
    if rng.random::<f64>() < 0.5 {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Bounded polynomial mutation of one gene.
fn polynomial_mutation(x: f64, lo: f64, hi: f64, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return x;
    }
    let d1 = (x - lo) / span;
    let d2 = (hi - x) / span;
    let u: f64 = rng.random();
    let pow = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(pow) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(pow)
    };
    (x + dq * span).clamp(lo, hi)
}

/// Run NSGA-II to completion and return the final rank-0 front.
pub fn nsga2_optimize(
    game_type: GameType,
    evader_samples: &[Vec<Vec2>],
    params: &Nsga2Params,
    seed: u64,
) -> Result<ParetoFront, GfsError> {
    let problem = PlacementProblem::new(game_type, evader_samples.to_vec());
    let mut ga = Nsga2::new(problem, params.clone(), seed)?;
    ga.run()?;
    Ok(ga.front())
}
