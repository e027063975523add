//! Four-layer graph convolutional network with symmetric-normalized
//! adjacency and a tanh squash into the arena.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gfs::{ConfigGraph, NODE_FEATURES};

use super::GcnError;

/// Layer widths, input to output.
pub const LAYER_DIMS: [usize; 5] = [NODE_FEATURES, 64, 32, 64, 2];
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Per-column `[min, max]` of the training inputs; generation samples noise
/// inside these ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanges {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureRanges {
    pub fn from_graphs<'a>(graphs: impl IntoIterator<Item = &'a ConfigGraph>) -> Option<Self> {
        let mut min = vec![f64::INFINITY; NODE_FEATURES];
        let mut max = vec![f64::NEG_INFINITY; NODE_FEATURES];
        let mut any = false;
        for g in graphs {
            for row in g.features.outer_iter() {
                any = true;
                for (c, v) in row.iter().enumerate() {
                    min[c] = min[c].min(*v);
                    max[c] = max[c].max(*v);
                }
            }
        }
        any.then_some(Self { min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnModel {
    pub format_version: u32,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    #[serde(default)]
    pub input_ranges: Option<FeatureRanges>,
}

/// Gradients with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &GcnModel) -> Self {
        Self {
            weights: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for w in &mut self.weights {
            *w *= s;
        }
        for b in &mut self.biases {
            *b *= s;
        }
    }
}

/// Intermediate values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub a_hat: Array2<f64>,
    /// `A_hat X_l` for each layer.
    pub aggregated: Vec<Array2<f64>>,
    /// Pre-activations `A_hat X_l W_l + b_l`.
    pub pre: Vec<Array2<f64>>,
    /// Squashed output positions.
    pub output: Array2<f64>,
}

/// `D^-1/2 (A + I) D^-1/2` with degrees taken from the weighted `A + I`.
pub fn normalized_adjacency(adjacency: &Array2<f64>) -> Array2<f64> {
    let n = adjacency.nrows();
    let mut a = adjacency.clone();
    for i in 0..n {
        a[[i, i]] += 1.0;
    }
    let inv_sqrt: Vec<f64> = a.sum_axis(Axis(1)).iter().map(|d| 1.0 / d.sqrt()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| inv_sqrt[i] * a[[i, j]] * inv_sqrt[j])
}

impl GcnModel {
    /// Glorot-uniform weights and zero biases.
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in LAYER_DIMS.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(Array2::from_shape_fn((fan_in, fan_out), |_| {
                rng.random_range(-limit..=limit)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Self {
            format_version: MODEL_FORMAT_VERSION,
            seed,
            dims: LAYER_DIMS.to_vec(),
            weights,
            biases,
            input_ranges: None,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn n_parameters(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), GcnError> {
        if self.dims != LAYER_DIMS || self.weights.len() != 4 || self.biases.len() != 4 {
            return Err(GcnError::Shape(format!("unexpected layer stack {:?}", self.dims)));
        }
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            if w.dim() != (self.dims[l], self.dims[l + 1]) || b.len() != self.dims[l + 1] {
                return Err(GcnError::Shape(format!("layer {l} has shape {:?}", w.dim())));
            }
        }
        if self.weights.iter().flatten().chain(self.biases.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(GcnError::NonFinite);
        }
        Ok(())
    }

    /// Forward pass on raw node features and (weighted, symmetric)
    /// adjacency without self-loops.
    pub fn forward_cached(&self, features: &Array2<f64>, adjacency: &Array2<f64>) -> Result<ForwardCache, GcnError> {
        let n = features.nrows();
        if features.ncols() != self.dims[0] {
            return Err(GcnError::Shape(format!(
                "node features have width {}, expected {}",
                features.ncols(),
                self.dims[0]
            )));
        }
        if adjacency.dim() != (n, n) {
            return Err(GcnError::Shape(format!("adjacency {:?} for {n} nodes", adjacency.dim())));
        }
        if adjacency.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(GcnError::Shape("edge weights must be finite and non-negative".into()));
        }
        let a_hat = normalized_adjacency(adjacency);
        let mut aggregated = Vec::with_capacity(4);
        let mut pre = Vec::with_capacity(4);
        let mut x = features.clone();
        let last = self.n_layers() - 1;
        for l in 0..=last {
            let m = a_hat.dot(&x);
            let z = m.dot(&self.weights[l]) + &self.biases[l];
            x = if l < last { z.mapv(|v| v.max(0.0)) } else { z.mapv(f64::tanh) };
            aggregated.push(m);
            pre.push(z);
        }
        Ok(ForwardCache {
            a_hat,
            aggregated,
            pre,
            output: x,
        })
    }

    pub fn forward_raw(&self, features: &Array2<f64>, adjacency: &Array2<f64>) -> Result<Array2<f64>, GcnError> {
        Ok(self.forward_cached(features, adjacency)?.output)
    }

    /// Output positions, one `(x, y)` row per node, inside `(-1, 1)^2`.
    pub fn forward(&self, graph: &ConfigGraph) -> Result<Array2<f64>, GcnError> {
        self.forward_raw(&graph.features, &graph.adjacency())
    }

    /// Back-propagate `d loss / d output` through the cached pass.
    pub fn backward(&self, cache: &ForwardCache, d_output: &Array2<f64>) -> Gradients {
        let last = self.n_layers() - 1;
        let mut grads = Gradients::zeros_like(self);
        let mut dz = d_output * &cache.output.mapv(|y| 1.0 - y * y);
        for l in (0..=last).rev() {
            grads.weights[l] = cache.aggregated[l].t().dot(&dz);
            grads.biases[l] = dz.sum_axis(Axis(0));
            if l == 0 {
                break;
            }
            let dm = dz.dot(&self.weights[l].t());
            let dx = cache.a_hat.t().dot(&dm);
            dz = dx * &cache.pre[l - 1].mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
        }
        grads
    }

    /// SHA-256 of the seed, layer shapes and parameters.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.format_version.to_le_bytes());
        h.update(self.seed.to_le_bytes());
        for d in &self.dims {
            h.update((*d as u64).to_le_bytes());
        }
        for v in self.weights.iter().flatten().chain(self.biases.iter().flatten()) {
            h.update(v.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Result<String, GcnError> {
        let file = ModelFile {
            hash: self.hash(),
            model: self.clone(),
        };
        serde_json::to_string(&file).map_err(|e| GcnError::Serde(e.to_string()))
    }

    /// Parse and verify the stored hash and shapes.
    pub fn from_json(s: &str) -> Result<Self, GcnError> {
        let file: ModelFile = serde_json::from_str(s).map_err(|e| GcnError::Serde(e.to_string()))?;
        if file.model.format_version != MODEL_FORMAT_VERSION {
            return Err(GcnError::Serde(format!(
                "unsupported model format {}",
                file.model.format_version
            )));
        }
        file.model.validate()?;
        if file.model.hash() != file.hash {
            return Err(GcnError::Serde("model hash mismatch".into()));
        }
        Ok(file.model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    hash: String,
    model: GcnModel,
}
