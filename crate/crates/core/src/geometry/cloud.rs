use crate::error::{Error, Result};
use crate::scalar::{dist, Real};

/// An ordered set of points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Real> PointCloud<T> {
    /// Builds a cloud from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        PointCloud {
            dim,
            coords: Vec::new(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.coords
    }

    pub fn push(&mut self, p: &[T]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Sub-cloud of the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            coords.extend_from_slice(self.point(r));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    pub fn centroid(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.dim];
        for p in self.iter() {
            for (acc, &v) in c.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let n = T::from_usize(self.len().max(1)).unwrap();
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    /// Every point minus `origin`.
    pub fn translated(&self, origin: &[T]) -> Self {
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(origin).map(|(&a, &b)| a - b))
            .collect();
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    pub fn max_norm(&self) -> T {
        self.iter()
            .map(crate::scalar::norm)
            .fold(T::zero(), T::max)
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.max(dist(self.point(i), self.point(j)));
            }
        }
        d
    }

    pub fn cast<U: Real>(&self) -> PointCloud<U> {
        PointCloud {
            dim: self.dim,
            coords: self
                .coords
                .iter()
                .map(|v| U::from_f64(v.as_f64()).unwrap())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(PointCloud::from_rows(&[vec![0.0, 1.0], vec![2.0]]).is_err());
        assert!(PointCloud::new(2, vec![0.0, f64::NAN]).is_err());
        assert!(PointCloud::new(2, vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn centroid_and_translation() {
        let c = PointCloud::from_rows(&[[0.5, 0.5], [0.5, 1.0], [1.0, 0.5], [1.0, 1.0]]).unwrap();
        assert_eq!(c.centroid(), vec![0.75, 0.75]);
        let t = c.translated(&c.centroid());
        assert_eq!(t.point(0), &[-0.25, -0.25]);
        assert_eq!(t.point(3), &[0.25, 0.25]);
        assert!((c.diameter() - 0.5_f64.sqrt()).abs() < 1e-15);
    }
}
