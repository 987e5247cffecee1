//! Simplex-level primitives: barycentric coordinates, circumspheres and
//! facet hyperplanes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Lu};
use crate::scalar::{dist_sq, dot, Real};

/// Condition estimate above which a barycentric or circumcenter system is
/// treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Containment tolerance on barycentric coordinates.
pub const BARY_TOL: f64 = 1e-9;

/// Absolute tolerance on squared distances in circumsphere tests.
pub const SPHERE_TOL: f64 = 1e-7;

/// Sorted tuple of `n + 1` vertex indices into a point cloud.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex {
    pub vertex_ids: Vec<usize>,
}

impl Simplex {
    pub fn new(mut vertex_ids: Vec<usize>) -> Self {
        vertex_ids.sort_unstable();
        Simplex { vertex_ids }
    }

    pub fn contains_vertex(&self, id: usize) -> bool {
        self.vertex_ids.binary_search(&id).is_ok()
    }

    /// The `(n-1)`-faces, each paired with the vertex it omits.
    pub fn facets(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        (0..self.vertex_ids.len()).map(move |skip| {
            let face = self
                .vertex_ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            (face, self.vertex_ids[skip])
        })
    }
}

/// Barycentric coordinates of a point with respect to a simplex; `coords[j]`
/// belongs to `simplex.vertex_ids[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Barycentric<T> {
    pub simplex: Simplex,
    pub coords: Vec<T>,
}

/// Builds the `(n+1) x (n+1)` system whose columns are `[v_j; 1]`.
fn barycentric_matrix<T: Real>(vertices: &[&[T]]) -> Vec<T> {
    let k = vertices.len();
    let n = k - 1;
    let mut a = vec![T::one(); k * k];
    for (j, v) in vertices.iter().enumerate() {
        for r in 0..n {
            a[r * k + j] = v[r];
        }
    }
    a
}

/// Solves `sum_j b_j v_j = x`, `sum_j b_j = 1`. Coordinates may be negative.
pub fn barycentric_solve<T: Real>(vertices: &[&[T]], x: &[T]) -> Result<Vec<T>> {
    let k = vertices.len();
    if k == 0 || vertices.iter().any(|v| v.len() + 1 != k) || x.len() + 1 != k {
        return Err(Error::DimensionMismatch {
            expected: k.saturating_sub(1),
            got: x.len(),
        });
    }
    let a = barycentric_matrix(vertices);
    let condition = linalg::cond1(&a, k);
    if !(condition.as_f64() <= MAX_CONDITION) {
        return Err(Error::SingularSimplex {
            condition: condition.as_f64(),
        });
    }
    let mut rhs = x.to_vec();
    rhs.push(T::one());
    Lu::new(&a, k)
        .solve(&rhs)
        .ok_or(Error::SingularSimplex {
            condition: f64::INFINITY,
        })
}

/// Row-major inverse of the barycentric system, or `None` when it is
/// numerically singular. `b = inv * [x; 1]`.
pub(crate) fn barycentric_inverse<T: Real>(vertices: &[&[T]]) -> Option<Vec<T>> {
    let k = vertices.len();
    let a = barycentric_matrix(vertices);
    let inv = Lu::new(&a, k).inverse()?;
    let condition = linalg::norm1(&a, k) * linalg::norm1(&inv, k);
    (condition.as_f64() <= MAX_CONDITION).then_some(inv)
}

/// Clamps coordinates in `[-tau, 0)` to zero and renormalises to unit sum.
pub fn clamp_coords<T: Real>(coords: &mut [T], tau: T) {
    for c in coords.iter_mut() {
        if *c < T::zero() && *c >= -tau {
            *c = T::zero();
        }
    }
    let s: T = coords.iter().copied().sum();
    if s > T::zero() {
        coords.iter_mut().for_each(|c| *c /= s);
    }
}

/// Circumcenter and squared circumradius of a full-dimensional simplex.
pub fn circumsphere<T: Real>(simplex_points: &[&[T]]) -> Result<(Vec<T>, T)> {
    let k = simplex_points.len();
    let n = k - 1;
    if simplex_points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: simplex_points[0].len(),
        });
    }
    let base = simplex_points[0];
    // 2 (v_i - v_0) . (c - v_0) = |v_i - v_0|^2
    let mut a = vec![T::zero(); n * n];
    let mut rhs = vec![T::zero(); n];
    for i in 0..n {
        let v = simplex_points[i + 1];
        for c in 0..n {
            a[i * n + c] = (v[c] - base[c]) * T::lit(2.0);
        }
        rhs[i] = dist_sq(v, base);
    }
    let condition = linalg::cond1(&a, n);
    if !(condition.as_f64() <= MAX_CONDITION) {
        return Err(Error::SingularSimplex {
            condition: condition.as_f64(),
        });
    }
    let rel = Lu::new(&a, n).solve(&rhs).ok_or(Error::SingularSimplex {
        condition: f64::INFINITY,
    })?;
    let r2 = dot(&rel, &rel);
    let center = rel.iter().zip(base).map(|(&d, &b)| d + b).collect();
    Ok((center, r2))
}

/// True iff `q` lies strictly inside the circumsphere, with an absolute
/// tolerance of [`SPHERE_TOL`] on the squared distance.
pub fn circumsphere_contains<T: Real>(simplex_points: &[&[T]], q: &[T]) -> Result<bool> {
    let (center, r2) = circumsphere(simplex_points)?;
    Ok(dist_sq(q, &center) < r2 - T::tol(SPHERE_TOL))
}

/// Unit normal and offset of the hyperplane through `n` points in `R^n`,
/// oriented so that `normal . opposite + offset < 0`.
pub(crate) fn facet_hyperplane<T: Real>(facet: &[&[T]], opposite: &[T]) -> Option<(Vec<T>, T)> {
    let n = opposite.len();
    debug_assert_eq!(facet.len(), n);
    let base = facet[0];
    let rows = n - 1;
    // Generalised cross product of the edge vectors: cofactor expansion.
    let mut normal = vec![T::zero(); n];
    let mut minor = vec![T::zero(); rows * rows];
    for (k, slot) in normal.iter_mut().enumerate() {
        for r in 0..rows {
            let v = facet[r + 1];
            let mut cc = 0;
            for c in 0..n {
                if c == k {
                    continue;
                }
                minor[r * rows + cc] = v[c] - base[c];
                cc += 1;
            }
        }
        let d = if rows == 0 {
            T::one()
        } else {
            linalg::det(&minor, rows)
        };
        *slot = if k % 2 == 0 { d } else { -d };
    }
    let len = dot(&normal, &normal).sqrt();
    if !(len > T::zero()) || !len.is_finite() {
        return None;
    }
    normal.iter_mut().for_each(|v| *v /= len);
    let mut offset = -dot(&normal, base);
    if dot(&normal, opposite) + offset > T::zero() {
        normal.iter_mut().for_each(|v| *v = -*v);
        offset = -offset;
    }
    Some((normal, offset))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cramer's rule for a 3x3 barycentric system, independent of the LU path.
    fn cramer_2d(v: [[f64; 2]; 3], x: [f64; 2]) -> [f64; 3] {
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let a = [
            [v[0][0], v[1][0], v[2][0]],
            [v[0][1], v[1][1], v[2][1]],
            [1.0, 1.0, 1.0],
        ];
        let rhs = [x[0], x[1], 1.0];
        let d = det3(a);
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            let mut m = a;
            for r in 0..3 {
                m[r][j] = rhs[r];
            }
            *o = det3(m) / d;
        }
        out
    }

    #[test]
    fn vertex_maps_to_indicator() {
        let v: [&[f64]; 3] = [&[0.3, -1.0], &[2.0, 0.5], &[-1.0, 1.5]];
        let b = barycentric_solve(&v, &[0.3, -1.0]).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12 && b[2].abs() < 1e-12);
    }

    #[test]
    fn square_example_interior_point() {
        let v = [[-0.25, -0.25], [-0.25, 0.25], [0.25, -0.25]];
        let x = [0.0, -0.15];
        let oracle = cramer_2d(v, x);
        for (o, w) in oracle.iter().zip([0.3, 0.2, 0.5]) {
            assert!((o - w).abs() < 1e-12);
        }
        let refs: Vec<&[f64]> = v.iter().map(|p| p.as_slice()).collect();
        let b = barycentric_solve(&refs, &x).unwrap();
        for (got, want) in b.iter().zip(oracle) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn square_example_sphere_simplex() {
        let v: [&[f64]; 3] = [&[0.0, 1.0], &[-0.25, 0.25], &[0.25, 0.25]];
        let b = barycentric_solve(&v, &[0.0, 0.5]).unwrap();
        for c in b {
            assert!((c - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_simplex_rejected() {
        let v: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]];
        assert!(matches!(
            barycentric_solve(&v, &[0.5, 0.5]),
            Err(Error::SingularSimplex { .. })
        ));
        assert!(circumsphere_contains(&v, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn right_triangle_circumsphere() {
        let t: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        let (c, r2) = circumsphere(&t).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
        assert!((r2 - 0.5).abs() < 1e-15);
        assert!(circumsphere_contains(&t, &[0.5, 0.5]).unwrap());
        assert!(!circumsphere_contains(&t, &[2.0, 2.0]).unwrap());
        assert!(!circumsphere_contains(&t, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn clamping_renormalises() {
        let mut b = [-5e-10, 0.5, 0.5 + 5e-10];
        clamp_coords(&mut b, 1e-9);
        assert_eq!(b[0], 0.0);
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mut far = [-0.1, 0.6, 0.5];
        clamp_coords(&mut far, 1e-9);
        assert_eq!(far[0], -0.1);
    }

    #[test]
    fn hyperplane_orientation() {
        let f: [&[f64]; 2] = [&[-0.25, 0.25], &[0.25, 0.25]];
        let (n, c) = facet_hyperplane(&f, &[-0.25, -0.25]).unwrap();
        assert!((n[0]).abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-15);
        assert!((c + 0.25).abs() < 1e-15);
        let (n3, c3) = facet_hyperplane::<f64>(
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
            &[0.0, 0.0, 0.0],
        )
        .unwrap();
        let s = 1.0 / 3.0_f64.sqrt();
        for v in &n3 {
            assert!((v - s).abs() < 1e-12);
        }
        assert!((c3 + s).abs() < 1e-12);
    }

    #[test]
    fn facets_enumerate_omitted_vertex() {
        let s = Simplex::new(vec![7, 2, 5]);
        let f: Vec<_> = s.facets().collect();
        assert_eq!(f[0], (vec![5, 7], 2));
        assert_eq!(f[2], (vec![2, 5], 7));
    }
}
