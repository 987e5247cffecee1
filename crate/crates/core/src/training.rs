//! Per-sample SGD on the weight matrix using the closed-form gradient
//! `dL/dW[j][t] = (s_j - y_j) xi_t`. Embeddings are computed once up front.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{fit_space, EmbeddingSpace, SparseXi, DEFAULT_RADIUS_MARGIN};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::model::{
    argmax, cross_entropy, init_weights, softmax, InitMode, LabelEncoding, SmnnModel, Weights,
};
use crate::scalar::Real;

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_mode: InitMode,
    pub shuffle: bool,
    pub radius_margin: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 500,
            seed: 0,
            init_mode: InitMode::Uniform01,
            shuffle: true,
            radius_margin: DEFAULT_RADIUS_MARGIN,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.radius_margin > 0.0) {
            return Err(Error::InvalidMargin(self.radius_margin));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// Mean loss of each sample just before its own update.
    pub mean_loss: f64,
    /// Training accuracy of the same pre-update predictions.
    pub accuracy: f64,
    /// Largest absolute gradient entry seen during the epoch.
    pub max_abs_gradient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    pub wall_time_secs: f64,
}

/// Embeddings and encoded labels of the training rows.
#[derive(Debug, Clone)]
pub struct CachedEmbedding<T> {
    pub xi: Vec<SparseXi<T>>,
    pub labels: Vec<usize>,
}

impl<T> CachedEmbedding<T> {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

/// `xi` of every training row, computed in parallel.
pub fn precompute_embeddings<T: Real>(
    space: &EmbeddingSpace<T>,
    train_points: &PointCloud<T>,
    train_labels: &[usize],
) -> Result<CachedEmbedding<T>> {
    if train_labels.len() != train_points.len() {
        return Err(Error::DimensionMismatch {
            expected: train_points.len(),
            got: train_labels.len(),
        });
    }
    let xi = (0..train_points.len())
        .into_par_iter()
        .map(|i| space.xi(train_points.point(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CachedEmbedding {
        xi,
        labels: train_labels.to_vec(),
    })
}

/// Gradient restricted to the columns touched by one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGradient<T> {
    /// `(t, column)` with `column[j] = (s_j - y_j) xi_t`.
    pub columns: Vec<(usize, Vec<T>)>,
}

impl<T: Real> SparseGradient<T> {
    pub fn get(&self, j: usize, t: usize) -> T {
        self.columns
            .iter()
            .find(|c| c.0 == t)
            .map(|c| c.1[j])
            .unwrap_or_else(T::zero)
    }

    pub fn max_abs(&self) -> T {
        self.columns
            .iter()
            .flat_map(|c| c.1.iter())
            .fold(T::zero(), |a, &v| a.max(v.abs()))
    }
}

fn residual<T: Real>(s: &mut [T], y: usize) {
    s[y] -= T::one();
}

pub fn gradient<T: Real>(weights: &Weights<T>, xi: &SparseXi<T>, y: usize) -> SparseGradient<T> {
    let mut r = softmax(&weights.logits(xi));
    residual(&mut r, y);
    SparseGradient {
        columns: xi
            .entries
            .iter()
            .map(|&(t, v)| (t, r.iter().map(|&d| d * v).collect()))
            .collect(),
    }
}

/// One SGD update; only the columns of the nonzero `xi` entries change.
pub fn sgd_step<T: Real>(weights: &mut Weights<T>, xi: &SparseXi<T>, y: usize, lr: T) {
    let g = gradient(weights, xi, y);
    apply(weights, &g, lr);
}

fn apply<T: Real>(weights: &mut Weights<T>, g: &SparseGradient<T>, lr: T) {
    for (t, col) in &g.columns {
        for (j, &d) in col.iter().enumerate() {
            *weights.get_mut(j, *t) -= lr * d;
        }
    }
}

/// Runs `config.epochs` passes of per-sample SGD over the cache.
pub fn run_epochs<T: Real>(
    weights: &mut Weights<T>,
    cache: &CachedEmbedding<T>,
    config: &TrainConfig,
) -> Vec<EpochStats> {
    let lr = T::lit(config.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..cache.len()).collect();
    let mut stats = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        let mut max_grad = T::zero();
        for &i in &order {
            let xi = &cache.xi[i];
            let y = cache.labels[i];
            let s = softmax(&weights.logits(xi));
            loss_sum += cross_entropy(&s, y).as_f64();
            if argmax(&s) == y {
                correct += 1;
            }
            let g = gradient(weights, xi, y);
            max_grad = max_grad.max(g.max_abs());
            apply(weights, &g, lr);
        }
        let n = cache.len().max(1) as f64;
        stats.push(EpochStats {
            mean_loss: loss_sum / n,
            accuracy: correct as f64 / n,
            max_abs_gradient: max_grad.as_f64(),
        });
    }
    stats
}

/// Fits the embedding space on the training set, initialises the weights
/// and trains them. Deterministic for a fixed configuration.
pub fn train<T: Real, S: AsRef<str>>(
    train_points: &PointCloud<T>,
    train_labels: &[S],
    support_indices: &[usize],
    config: &TrainConfig,
) -> Result<(SmnnModel<T>, TrainReport)> {
    let encoding = LabelEncoding::from_labels(train_labels)?;
    train_with_encoding(train_points, train_labels, support_indices, encoding, config)
}

/// Like [`train`] with a caller-supplied label encoding.
pub fn train_with_encoding<T: Real, S: AsRef<str>>(
    train_points: &PointCloud<T>,
    train_labels: &[S],
    support_indices: &[usize],
    encoding: LabelEncoding,
    config: &TrainConfig,
) -> Result<(SmnnModel<T>, TrainReport)> {
    config.validate()?;
    let start = Instant::now();
    let labels = encoding.encode_all(train_labels)?;
    let space = fit_space(train_points, support_indices, T::lit(config.radius_margin))?;
    let support_labels: Vec<usize> = space.support_rows().iter().map(|&r| labels[r]).collect();
    let cache = precompute_embeddings(&space, train_points, &labels)?;
    let mut weights = init_weights(
        config.init_mode,
        config.seed,
        encoding.k(),
        space.support_len(),
        &support_labels,
    );
    let epochs = run_epochs(&mut weights, &cache, config);
    let model = SmnnModel::new(space, encoding, weights, support_labels)?;
    let report = TrainReport {
        epochs,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}
