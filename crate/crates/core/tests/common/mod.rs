//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smnn::PointCloud;

/// Gaussian elimination with partial pivoting on a dense square system.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Barycentric coordinates of `x` in the simplex with vertices `pts`.
pub fn barycentric(pts: &[&[f64]], x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for (c, p) in pts.iter().enumerate() {
        for r in 0..n {
            a[r][c] = p[r];
        }
        a[n][c] = 1.0;
    }
    let mut b = x.to_vec();
    b.push(1.0);
    solve(a, b)
}

/// Centre and radius of the sphere through the `n + 1` points `pts`.
pub fn circumsphere(pts: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let n = pts[0].len();
    let p0 = pts[0];
    let sq = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
    let a: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| (0..n).map(|d| 2.0 * (p[d] - p0[d])).collect())
        .collect();
    let b: Vec<f64> = pts[1..].iter().map(|p| sq(p) - sq(p0)).collect();
    let c = solve(a, b)?;
    let r = dist(&c, p0);
    Some((c, r))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points uniform in `[-1, 1]^dim`.
pub fn uniform_cloud(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> PointCloud {
    let coords = (0..dim * count).map(|_| rng.random_range(-1.0..1.0)).collect();
    PointCloud::new(dim, coords).unwrap()
}

/// Up to `count` distinct integer lattice points in `[0, side)^dim`; many
/// of them are co-spherical.
pub fn lattice_cloud(rng: &mut ChaCha8Rng, dim: usize, count: usize, side: i32) -> PointCloud {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for _ in 0..count * 4 {
        if rows.len() == count {
            break;
        }
        let p: Vec<f64> = (0..dim).map(|_| f64::from(rng.random_range(0..side))).collect();
        if !rows.contains(&p) {
            rows.push(p);
        }
    }
    PointCloud::from_rows(&rows).unwrap()
}

/// Uniform point in the ball of radius `r` around the origin.
pub fn in_ball(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-r..r)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= r * r {
            return p;
        }
    }
}
