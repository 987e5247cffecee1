//! Synthetic datasets, the bundled Iris table, CSV I/O and stratified splits.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

pub const DEFAULT_TURNS: f64 = 0.65;
pub const DEFAULT_NOISE_SD: f64 = 0.03;
pub const DEFAULT_CLASS_SEP: f64 = 1.0;
pub const DEFAULT_FLIP_FRACTION: f64 = 0.02;
pub const DEFAULT_CLUSTERS_PER_CLASS: usize = 2;

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Points with one label name each.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub points: PointCloud<f64>,
    pub labels: Vec<String>,
}

impl LabeledDataset {
    pub fn new(points: PointCloud<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        let distinct = labels.iter().collect::<std::collections::BTreeSet<_>>().len();
        if distinct < 2 {
            return Err(Error::InvalidConfig(format!(
                "dataset needs at least 2 distinct labels, found {distinct}"
            )));
        }
        Ok(LabeledDataset { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        LabeledDataset {
            points: self.points.select(rows),
            labels: rows.iter().map(|&r| self.labels[r].clone()).collect(),
        }
    }

    /// Number of rows per label, in label order.
    pub fn class_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for l in &self.labels {
            *counts.entry(l.as_str()).or_insert(0) += 1;
        }
        counts
    }
}

/// Two interleaved Archimedean arms labelled `"0"` and `"1"`.
///
/// Arm `a` has `n_samples / 2` points at evenly spaced `s` in `[0, 1]`:
/// `s (cos(2 pi turns s + a pi), sin(2 pi turns s + a pi))` plus Gaussian
/// noise of standard deviation `noise_sd` on each coordinate.
pub fn gen_spiral(n_samples: usize, noise_sd: f64, turns: f64, seed: u64) -> Result<LabeledDataset> {
    if n_samples < 4 || n_samples % 2 != 0 {
        return Err(Error::InvalidCount(n_samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_arm = n_samples / 2;
    let mut coords = Vec::with_capacity(2 * n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    for arm in 0..2 {
        for i in 0..per_arm {
            let s = i as f64 / (per_arm - 1) as f64;
            let theta = turns * 2.0 * PI * s + arm as f64 * PI;
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            coords.push(s * theta.cos() + noise_sd * nx);
            coords.push(s * theta.sin() + noise_sd * ny);
            labels.push(arm.to_string());
        }
    }
    LabeledDataset::new(PointCloud::new(2, coords)?, labels)
}

/// Two-class Gaussian clusters on hypercube vertices, labelled `"0"`/`"1"`.
///
/// Cluster `c` sits at the vertex whose coordinate `d` is `+class_sep` when
/// bit `d` of `c` is set and `-class_sep` otherwise, and belongs to class
/// `c / clusters_per_class`. Row `i` is drawn from cluster `i mod clusters`
/// with unit covariance. Then `round(flip_fraction * n_samples)` rows, chosen
/// at random, get the other label.
pub fn gen_clusters(
    n_samples: usize,
    n_features: usize,
    clusters_per_class: usize,
    class_sep: f64,
    flip_fraction: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if n_features < 2 {
        return Err(Error::DimensionTooSmall {
            dim: n_features,
            needed: 2,
            got: n_features,
        });
    }
    if n_samples < 10 {
        return Err(Error::InvalidCount(n_samples));
    }
    if !(0.0..=1.0).contains(&flip_fraction) {
        return Err(Error::InvalidConfig(format!(
            "flip fraction must lie in [0, 1], got {flip_fraction}"
        )));
    }
    let clusters = 2 * clusters_per_class;
    let vertices = if n_features >= usize::BITS as usize {
        usize::MAX
    } else {
        1usize << n_features
    };
    if clusters_per_class == 0 || clusters > vertices {
        return Err(Error::TooManyClusters { clusters, vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n_samples * n_features);
    let mut classes = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let c = i % clusters;
        for d in 0..n_features {
            let sign = if (c >> d) & 1 == 1 { 1.0 } else { -1.0 };
            let z: f64 = rng.sample(StandardNormal);
            coords.push(sign * class_sep + z);
        }
        classes.push(c / clusters_per_class);
    }
    let flips = (flip_fraction * n_samples as f64).round() as usize;
    for i in index::sample(&mut rng, n_samples, flips) {
        classes[i] = 1 - classes[i];
    }
    let labels = classes.into_iter().map(|c| c.to_string()).collect();
    LabeledDataset::new(PointCloud::new(n_features, coords)?, labels)
}

/// The 150-row Iris table (4 features, 3 classes) bundled with the crate.
pub fn iris() -> LabeledDataset {
    read_csv(IRIS_CSV.as_bytes()).expect("bundled iris table parses")
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    read_csv(std::fs::File::open(path)?)
}

/// Parses `f1,...,fn,label` rows after a header line. Row numbers in
/// errors count file lines from 1 (the header is row 1); columns count
/// from 1.
pub fn read_csv<R: Read>(reader: R) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let width = rdr.headers()?.len();
    if width < 2 {
        return Err(Error::ParseError {
            row: 1,
            column: width.max(1),
            message: "header needs at least one feature and a label column".into(),
        });
    }
    let dim = width - 1;
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map_or(i + 2, |p| p.line() as usize);
        if rec.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: rec.len(),
            });
        }
        for (c, cell) in rec.iter().take(dim).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::ParseError {
                row,
                column: c + 1,
                message: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::ParseError {
                    row,
                    column: c + 1,
                    message: format!("{cell:?} is not finite"),
                });
            }
            coords.push(v);
        }
        labels.push(rec[dim].to_owned());
    }
    LabeledDataset::new(PointCloud::new(dim, coords)?, labels)
}

pub fn save_csv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(dataset, std::io::BufWriter::new(file))
}

/// Writes a header and one row per point. Floats use the shortest form that
/// parses back to the same value.
pub fn write_csv<W: Write>(dataset: &LabeledDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let dim = dataset.dim();
    let mut header: Vec<String> = (1..=dim).map(|d| format!("f{d}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (p, label) in dataset.points.iter().zip(&dataset.labels) {
        let mut rec: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        rec.push(label.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Stratified split into `(train, test)`.
///
/// The train side gets `floor(train_fraction * n)` rows. Each class gets the
/// floor of its proportional share, and leftover rows go to the classes with
/// the largest remainders (lower label first on ties). Within a class the
/// rows are chosen by a seeded shuffle. A class with at least two rows keeps
/// at least one on each side. Both sides preserve the original row order.
pub fn split(dataset: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in dataset.labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let total = (train_fraction * dataset.len() as f64).floor() as usize;
    let shares: Vec<f64> = by_class
        .values()
        .map(|rows| train_fraction * rows.len() as f64)
        .collect();
    let mut quota: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total.saturating_sub(quota.iter().sum());
    for &c in order.iter().cycle().take(order.len() * 2) {
        if left == 0 {
            break;
        }
        let size = by_class.values().nth(c).map_or(0, Vec::len);
        if quota[c] < size {
            quota[c] += 1;
            left -= 1;
        }
    }
    for (q, rows) in quota.iter_mut().zip(by_class.values()) {
        if rows.len() >= 2 {
            *q = (*q).clamp(1, rows.len() - 1);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (q, rows) in quota.iter().zip(by_class.values()) {
        let mut rows = rows.clone();
        rows.shuffle(&mut rng);
        train.extend_from_slice(&rows[..*q]);
        test.extend_from_slice(&rows[*q..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.select(&train), dataset.select(&test)))
}
