//! Label encoding, the weight matrix and the forward map
//! `x -> softmax(W xi(x))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingSpace, SparseXi};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probabilities are floored at this value inside the logarithm.
pub const LOSS_FLOOR: f64 = 1e-12;

/// Ordered set of `k >= 2` class names. Class `j` is `labels[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelEncoding {
    labels: Vec<String>,
}

impl LabelEncoding {
    /// Keeps the given order. Names must be distinct and at least two.
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidConfig("label names must be distinct".into()));
        }
        if labels.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 classes, got {}",
                labels.len()
            )));
        }
        Ok(LabelEncoding { labels })
    }

    /// Encoding of the distinct names in `labels`, in sorted order.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let unique: BTreeSet<&str> = labels.iter().map(|s| s.as_ref()).collect();
        Self::new(unique.into_iter().map(str::to_owned).collect())
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn encode_all<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    pub fn one_hot<T: Real>(&self, j: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.k()];
        v[j] = T::one();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    #[default]
    Uniform01,
    OneHot,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Uniform01 => "uniform01",
            InitMode::OneHot => "one_hot",
        })
    }
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" => Ok(InitMode::Uniform01),
            "one_hot" => Ok(InitMode::OneHot),
            other => Err(Error::InvalidConfig(format!("unknown init mode {other:?}"))),
        }
    }
}

/// Dense `k x m` weight matrix, row-major. Entry `(j, t)` links support
/// point `t` to class `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights<T> {
    k: usize,
    m: usize,
    data: Vec<T>,
}

impl<T: Real> Weights<T> {
    pub fn zeros(k: usize, m: usize) -> Self {
        Weights {
            k,
            m,
            data: vec![T::zero(); k * m],
        }
    }

    pub fn from_row_major(k: usize, m: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != k * m {
            return Err(Error::DimensionMismatch {
                expected: k * m,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite weight".into()));
        }
        Ok(Weights { k, m, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, j: usize, t: usize) -> T {
        self.data[j * self.m + t]
    }

    #[inline]
    pub fn get_mut(&mut self, j: usize, t: usize) -> &mut T {
        &mut self.data[j * self.m + t]
    }

    pub fn column(&self, t: usize) -> Vec<T> {
        (0..self.k).map(|j| self.get(j, t)).collect()
    }

    pub fn as_row_major(&self) -> &[T] {
        &self.data
    }

    /// `z_j = sum_t W[j][t] xi_t` over the sparse entries.
    pub fn logits(&self, xi: &SparseXi<T>) -> Vec<T> {
        let mut z = vec![T::zero(); self.k];
        for &(t, v) in &xi.entries {
            for (j, zj) in z.iter_mut().enumerate() {
                *zj += self.get(j, t) * v;
            }
        }
        z
    }
}

/// Initial weights. `Uniform01` draws i.i.d. from `[0, 1)` with a ChaCha8
/// stream seeded by `seed`; `OneHot` sets column `t` to the indicator of
/// `support_labels[t]`.
pub fn init_weights<T: Real>(
    mode: InitMode,
    seed: u64,
    k: usize,
    m: usize,
    support_labels: &[usize],
) -> Weights<T> {
    let mut w = Weights::zeros(k, m);
    match mode {
        InitMode::Uniform01 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let below_one = T::one() - T::epsilon();
            for v in w.data.iter_mut() {
                *v = T::lit(rng.random::<f64>()).min(below_one);
            }
        }
        InitMode::OneHot => {
            for (t, &j) in support_labels.iter().enumerate().take(m) {
                *w.get_mut(j, t) = T::one();
            }
        }
    }
    w
}

/// Softmax with the maximum subtracted first.
pub fn softmax<T: Real>(z: &[T]) -> Vec<T> {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let e: Vec<T> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: T = e.iter().copied().sum();
    e.into_iter().map(|v| v / sum).collect()
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<T: Real>(s: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in s.iter().enumerate().skip(1) {
        if v > s[best] {
            best = j;
        }
    }
    best
}

/// `-ln s_j`, with `s_j` floored at [`LOSS_FLOOR`].
pub fn cross_entropy<T: Real>(s: &[T], j: usize) -> T {
    -s[j].max(T::lit(LOSS_FLOOR)).ln()
}

/// A trained (or freshly initialised) simplicial map classifier.
#[derive(Debug, Clone)]
pub struct SmnnModel<T> {
    pub space: EmbeddingSpace<T>,
    pub encoding: LabelEncoding,
    pub weights: Weights<T>,
    /// Class index of each support point.
    pub support_labels: Vec<usize>,
}

impl<T: Real> SmnnModel<T> {
    pub fn new(
        space: EmbeddingSpace<T>,
        encoding: LabelEncoding,
        weights: Weights<T>,
        support_labels: Vec<usize>,
    ) -> Result<Self> {
        let m = space.support_len();
        if weights.k() != encoding.k() || weights.m() != m {
            return Err(Error::InvalidModel(format!(
                "weights are {}x{}, expected {}x{m}",
                weights.k(),
                weights.m(),
                encoding.k()
            )));
        }
        if support_labels.len() != m || support_labels.iter().any(|&j| j >= encoding.k()) {
            return Err(Error::InvalidModel("support labels do not match".into()));
        }
        Ok(SmnnModel {
            space,
            encoding,
            weights,
            support_labels,
        })
    }

    pub fn k(&self) -> usize {
        self.encoding.k()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn xi(&self, x_raw: &[T]) -> Result<SparseXi<T>> {
        self.space.xi(x_raw)
    }

    pub fn logits(&self, xi: &SparseXi<T>) -> Vec<T> {
        self.weights.logits(xi)
    }

    pub fn forward_xi(&self, xi: &SparseXi<T>) -> Vec<T> {
        softmax(&self.logits(xi))
    }

    pub fn forward(&self, x_raw: &[T]) -> Result<Vec<T>> {
        Ok(self.forward_xi(&self.xi(x_raw)?))
    }

    /// Predicted class index.
    pub fn predict_index(&self, x_raw: &[T]) -> Result<usize> {
        Ok(argmax(&self.forward(x_raw)?))
    }

    pub fn predict(&self, x_raw: &[T]) -> Result<&str> {
        Ok(self.encoding.label(self.predict_index(x_raw)?))
    }

    pub fn loss(&self, x_raw: &[T], true_label: &str) -> Result<T> {
        let j = self.encoding.index_of(true_label)?;
        Ok(cross_entropy(&self.forward(x_raw)?, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::fit_space;
    use crate::geometry::PointCloud;

    fn xi(entries: &[(usize, f64)], sphere_mass: f64) -> SparseXi<f64> {
        SparseXi {
            entries: entries.to_vec(),
            sphere_mass,
            sphere_point: None,
            facet_used: None,
        }
    }

    fn example_weights() -> Weights<f64> {
        init_weights(InitMode::OneHot, 0, 2, 4, &[0, 0, 1, 1])
    }

    #[test]
    fn one_hot_matches_example_matrix() {
        let w = example_weights();
        assert_eq!(w.as_row_major(), &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn uniform_is_deterministic_and_in_range() {
        let a: Weights<f64> = init_weights(InitMode::Uniform01, 42, 3, 5, &[]);
        let b: Weights<f64> = init_weights(InitMode::Uniform01, 42, 3, 5, &[]);
        assert_eq!(a, b);
        assert_eq!(a.as_row_major().len(), 15);
        assert!(a.as_row_major().iter().all(|&v| (0.0..1.0).contains(&v)));
        let c: Weights<f64> = init_weights(InitMode::Uniform01, 43, 3, 5, &[]);
        assert_ne!(a, c);
    }

    #[test]
    fn logits_examples() {
        let w = example_weights();
        let z = w.logits(&xi(&[(0, 0.3), (1, 0.2), (2, 0.5)], 0.0));
        assert!((z[0] - 0.5).abs() < 1e-15 && (z[1] - 0.5).abs() < 1e-15);
        assert_eq!(w.logits(&xi(&[(2, 1.0)], 0.0)), w.column(2));
        let third = 1.0 / 3.0;
        let z = w.logits(&xi(&[(1, third), (3, third)], third));
        assert_eq!(z, vec![third, third]);
    }

    #[test]
    fn sphere_mass_carries_no_weight() {
        let w: Weights<f64> = init_weights(InitMode::Uniform01, 3, 2, 4, &[]);
        let base = w.logits(&xi(&[(1, 0.25), (3, 0.25)], 0.5));
        for mass in [0.0, 0.1, 7.0, 1e6] {
            assert_eq!(w.logits(&xi(&[(1, 0.25), (3, 0.25)], mass)), base);
        }
    }

    #[test]
    fn softmax_is_stable_and_shift_invariant() {
        assert_eq!(softmax(&[1000.0, 1000.0]), vec![0.5, 0.5]);
        let a = softmax(&[0.3_f64, -1.2, 2.0]);
        let b = softmax(&[1e3 + 0.3, 1e3 - 1.2, 1e3 + 2.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let s = softmax(&[1e4, -1e4, 0.0]);
        assert!(s.iter().all(|&v| v >= 0.0));
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn argmax_and_loss() {
        assert_eq!(argmax(&[0.9, 0.1]), 0);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert!((cross_entropy(&[0.5_f64, 0.5], 1) - 2f64.ln()).abs() < 1e-15);
        assert!((cross_entropy(&[0.9_f64, 0.1], 1) - 2.302585092994046).abs() < 1e-12);
        assert!(cross_entropy(&[1.0 - 1e-15, 1e-15], 0) < 1e-12);
        assert!((cross_entropy(&[1.0_f64, 0.0], 1) - 27.631021115928547).abs() < 1e-9);
    }

    #[test]
    fn encoding_is_sorted_and_checked() {
        let e = LabelEncoding::from_labels(&["b", "a", "b", "c"]).unwrap();
        assert_eq!(e.labels(), &["a", "b", "c"]);
        assert_eq!(e.index_of("c").unwrap(), 2);
        assert!(matches!(e.index_of("z"), Err(Error::UnknownLabel(_))));
        assert_eq!(e.one_hot::<f64>(1), vec![0.0, 1.0, 0.0]);
        assert!(LabelEncoding::from_labels(&["a", "a"]).is_err());
        assert!(LabelEncoding::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn init_mode_names() {
        assert_eq!("one_hot".parse::<InitMode>().unwrap(), InitMode::OneHot);
        assert_eq!(InitMode::Uniform01.to_string(), "uniform01");
        assert_eq!(serde_json::to_string(&InitMode::OneHot).unwrap(), "\"one_hot\"");
        assert_eq!(serde_json::to_string(&InitMode::Uniform01).unwrap(), "\"uniform01\"");
        assert!("adam".parse::<InitMode>().is_err());
    }

    #[test]
    fn consistence_on_support_points() {
        let pts = [[-0.25, -0.25], [-0.25, 0.25], [0.25, -0.25], [0.25, 0.25], [0.1, 0.0]];
        let cloud = PointCloud::from_rows(&pts).unwrap();
        let space = fit_space(&cloud, &[0, 1, 2, 3, 4], 1.0).unwrap();
        let labels = vec![0, 0, 1, 1, 1];
        let enc = LabelEncoding::from_labels(&["x", "y"]).unwrap();
        let w = init_weights(InitMode::OneHot, 0, 2, 5, &labels);
        let model = SmnnModel::new(space, enc, w, labels.clone()).unwrap();
        for (t, p) in pts.iter().enumerate() {
            assert_eq!(model.predict_index(p).unwrap(), labels[t]);
        }
    }
}
