use crate::error::{Error, Result};
use crate::linalg::mat_vec;
use crate::scalar::{dot, Real};

use super::cloud::PointCloud;
use super::delaunay;
use super::simplex::{barycentric_inverse, clamp_coords, facet_hyperplane, Barycentric, Simplex, BARY_TOL};

/// A face of exactly one maximal simplex, with its outward hyperplane
/// `normal . x + offset = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFacet<T> {
    pub facet_ids: Vec<usize>,
    pub opposite_id: usize,
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Real> BoundaryFacet<T> {
    /// Signed distance of `x` to the facet hyperplane, positive outside.
    #[inline]
    pub fn signed_distance(&self, x: &[T]) -> T {
        dot(&self.normal, x) + self.offset
    }
}

#[derive(Debug, Clone)]
struct LocateCache<T> {
    /// Row-major inverse of the barycentric system, `None` for flat simplices.
    inverse: Option<Vec<T>>,
    lo: Vec<T>,
    hi: Vec<T>,
}

/// Delaunay triangulation of a point cloud with its hull boundary.
///
/// Immutable once built; all queries take `&self`.
#[derive(Debug, Clone)]
pub struct Triangulation<T> {
    cloud: PointCloud<T>,
    maximal: Vec<Simplex>,
    boundary: Vec<BoundaryFacet<T>>,
    cache: Vec<LocateCache<T>>,
}

/// Builds the Delaunay triangulation of `cloud`.
///
/// Ties between co-spherical points are broken by the small index-dependent
/// lift described in [`delaunay`](super::delaunay); all returned geometry
/// (normals, barycentric data) uses the input coordinates.
pub fn build_delaunay<T: Real>(cloud: &PointCloud<T>) -> Result<Triangulation<T>> {
    let coords: Vec<f64> = cloud.as_flat().iter().map(|v| v.as_f64()).collect();
    let raw = delaunay::triangulate(cloud.dim(), &coords)?;
    let maximal = raw.simplices.into_iter().map(Simplex::new).collect();
    let mut boundary = Vec::with_capacity(raw.boundary.len());
    for (facet_ids, opposite_id) in raw.boundary {
        let pts: Vec<&[T]> = facet_ids.iter().map(|&v| cloud.point(v)).collect();
        let (normal, offset) = facet_hyperplane(&pts, cloud.point(opposite_id))
            .ok_or(Error::DegenerateSupport { dim: cloud.dim() })?;
        boundary.push(BoundaryFacet {
            facet_ids,
            opposite_id,
            normal,
            offset,
        });
    }
    Triangulation::from_parts(cloud.clone(), maximal, boundary)
}

impl<T: Real> Triangulation<T> {
    /// Reassembles a triangulation from stored parts (e.g. a model file).
    pub fn from_parts(
        cloud: PointCloud<T>,
        maximal: Vec<Simplex>,
        boundary: Vec<BoundaryFacet<T>>,
    ) -> Result<Self> {
        let n = cloud.dim();
        let m = cloud.len();
        let bad = |what: String| Error::InvalidModel(what);
        for s in &maximal {
            if s.vertex_ids.len() != n + 1 || s.vertex_ids.iter().any(|&v| v >= m) {
                return Err(bad(format!("simplex {:?} is invalid", s.vertex_ids)));
            }
        }
        for f in &boundary {
            if f.facet_ids.len() != n
                || f.normal.len() != n
                || f.opposite_id >= m
                || f.facet_ids.iter().any(|&v| v >= m)
            {
                return Err(bad(format!("boundary facet {:?} is invalid", f.facet_ids)));
            }
        }
        let cache = maximal
            .iter()
            .map(|s| {
                let pts: Vec<&[T]> = s.vertex_ids.iter().map(|&v| cloud.point(v)).collect();
                let mut lo = pts[0].to_vec();
                let mut hi = pts[0].to_vec();
                for p in &pts[1..] {
                    for d in 0..n {
                        lo[d] = lo[d].min(p[d]);
                        hi[d] = hi[d].max(p[d]);
                    }
                }
                LocateCache {
                    inverse: barycentric_inverse(&pts),
                    lo,
                    hi,
                }
            })
            .collect();
        Ok(Triangulation {
            cloud,
            maximal,
            boundary,
            cache,
        })
    }

    pub fn cloud(&self) -> &PointCloud<T> {
        &self.cloud
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    pub fn maximal(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn boundary(&self) -> &[BoundaryFacet<T>] {
        &self.boundary
    }

    pub fn simplex_points(&self, s: &Simplex) -> Vec<&[T]> {
        s.vertex_ids.iter().map(|&v| self.cloud.point(v)).collect()
    }

    /// Raw (unclamped) barycentric coordinates of `x` in maximal simplex `i`.
    pub fn barycentric_in(&self, i: usize, x: &[T]) -> Option<Vec<T>> {
        let inv = self.cache[i].inverse.as_ref()?;
        let k = self.dim() + 1;
        let mut xh = x.to_vec();
        xh.push(T::one());
        Some(mat_vec(inv, k, k, &xh))
    }

    /// Finds the lowest-index maximal simplex containing `x` (all coordinates
    /// `>= -1e-9`) and returns its index with clamped coordinates.
    pub fn locate(&self, x: &[T]) -> Option<(usize, Barycentric<T>)> {
        let tau = T::tol(BARY_TOL);
        let n = self.dim();
        for (i, c) in self.cache.iter().enumerate() {
            let outside_box = (0..n).any(|d| {
                let slack = tau * (T::one() + (c.hi[d] - c.lo[d]).abs() + x[d].abs());
                x[d] < c.lo[d] - slack || x[d] > c.hi[d] + slack
            });
            if outside_box {
                continue;
            }
            let Some(mut coords) = self.barycentric_in(i, x) else {
                continue;
            };
            if coords.iter().all(|&b| b >= -tau) {
                clamp_coords(&mut coords, tau);
                return Some((
                    i,
                    Barycentric {
                        simplex: self.maximal[i].clone(),
                        coords,
                    },
                ));
            }
        }
        None
    }

    /// Indices of the boundary facets whose hyperplane strictly separates `x`
    /// from the facet's opposite vertex.
    pub fn visible_boundary_facets(&self, x: &[T]) -> Result<Vec<usize>> {
        let visible: Vec<usize> = self
            .boundary
            .iter()
            .enumerate()
            .filter(|(_, f)| {
                let inner = f.signed_distance(self.cloud.point(f.opposite_id));
                inner * f.signed_distance(x) < T::zero()
            })
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            Err(Error::NoVisibleFacet)
        } else {
            Ok(visible)
        }
    }

    /// Like [`visible_boundary_facets`](Self::visible_boundary_facets) but
    /// also keeps facets whose hyperplane passes within `tol` of `x`.
    pub fn weakly_visible_facets(&self, x: &[T], tol: T) -> Vec<usize> {
        self.boundary
            .iter()
            .enumerate()
            .filter(|(_, f)| f.signed_distance(x) >= -tol)
            .map(|(i, _)| i)
            .collect()
    }
}
