//! Support-set selection by greedy farthest-point traversal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::scalar::{dist, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    Epsilon,
    Kappa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: SamplerMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn epsilon(epsilon: f64, seed: u64) -> Self {
        SamplerConfig {
            mode: SamplerMode::Epsilon,
            epsilon: Some(epsilon),
            kappa: None,
            seed,
        }
    }

    pub fn kappa(kappa: f64, seed: u64) -> Self {
        SamplerConfig {
            mode: SamplerMode::Kappa,
            epsilon: None,
            kappa: Some(kappa),
            seed,
        }
    }

    /// The cover radius to use on `points` (original coordinates).
    pub fn resolve_epsilon<T: Real>(&self, points: &PointCloud<T>) -> Result<f64> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(Error::InvalidConfig(format!("{name} must be a positive number"))),
        };
        match self.mode {
            SamplerMode::Epsilon => positive("epsilon", self.epsilon),
            SamplerMode::Kappa => {
                let kappa = positive("kappa", self.kappa)?;
                let centred = points.translated(&points.centroid());
                Ok(epsilon_from_kappa(&centred, kappa))
            }
        }
    }

    /// Resolves the cover radius and selects the support rows.
    pub fn select<T: Real>(&self, points: &PointCloud<T>) -> Result<(f64, Vec<usize>)> {
        let eps = self.resolve_epsilon(points)?;
        Ok((eps, epsilon_representative(points, eps, self.seed)))
    }
}

/// `(max |v| + 1/2) / kappa` for points already centred at the origin.
pub fn epsilon_from_kappa<T: Real>(centred: &PointCloud<T>, kappa: f64) -> f64 {
    (centred.max_norm().as_f64() + 0.5) / kappa
}

/// Greedy farthest-point traversal of all points.
///
/// Starts at the point nearest the centroid and repeatedly takes the point
/// farthest from those already chosen. Returns the visiting order and, for
/// each prefix length `i + 1`, the cover radius of that prefix. Exact
/// distance ties are broken by a permutation drawn from `seed`.
pub fn farthest_point_order<T: Real>(points: &PointCloud<T>, seed: u64) -> (Vec<usize>, Vec<f64>) {
    let n = points.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut priority: Vec<usize> = (0..n).collect();
    priority.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let better = |d: f64, i: usize, best_d: f64, best: usize, nearer: bool| {
        if d == best_d {
            priority[i] < priority[best]
        } else if nearer {
            d < best_d
        } else {
            d > best_d
        }
    };

    let centroid = points.centroid();
    let mut start = 0;
    let mut start_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = dist(p, &centroid).as_f64();
        if i == 0 || better(d, i, start_d, start, true) {
            start = i;
            start_d = d;
        }
    }

    let mut nearest: Vec<f64> = points.iter().map(|p| dist(p, points.point(start)).as_f64()).collect();
    let mut order = vec![start];
    let mut radii = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    taken[start] = true;
    loop {
        let mut next = usize::MAX;
        let mut far = -1.0;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            if next == usize::MAX || better(nearest[i], i, far, next, false) {
                next = i;
                far = nearest[i];
            }
        }
        if next == usize::MAX {
            radii.push(0.0);
            break;
        }
        radii.push(far);
        taken[next] = true;
        order.push(next);
        let p = points.point(next);
        for i in 0..n {
            let d = dist(points.point(i), p).as_f64();
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
    (order, radii)
}

/// Smallest farthest-point prefix whose cover radius is below `epsilon`,
/// as ascending row indices.
pub fn epsilon_representative<T: Real>(points: &PointCloud<T>, epsilon: f64, seed: u64) -> Vec<usize> {
    let (order, radii) = farthest_point_order(points, seed);
    let len = radii
        .iter()
        .position(|&r| r < epsilon)
        .map_or(order.len(), |i| i + 1);
    let mut rows = order[..len].to_vec();
    rows.sort_unstable();
    rows
}

/// Largest distance from a point to its nearest selected point.
pub fn cover_radius<T: Real>(points: &PointCloud<T>, selected: &[usize]) -> f64 {
    points
        .iter()
        .map(|p| {
            selected
                .iter()
                .map(|&s| dist(p, points.point(s)).as_f64())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// A cover radius giving exactly `size` support points, when one exists:
/// the midpoint between consecutive prefix radii.
pub fn epsilon_for_size<T: Real>(points: &PointCloud<T>, size: usize, seed: u64) -> Option<f64> {
    let (_, radii) = farthest_point_order(points, seed);
    if size == 0 || size > radii.len() {
        return None;
    }
    let hi = if size == 1 { radii[0] * 2.0 + 1.0 } else { radii[size - 2] };
    let lo = radii[size - 1];
    (lo < hi).then(|| 0.5 * (lo + hi))
}
