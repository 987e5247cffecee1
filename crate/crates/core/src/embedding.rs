//! The embedding space: training data centred at the origin, a bounding ball
//! of radius `R`, and the Delaunay triangulation of the support set.
//!
//! [`EmbeddingSpace::xi`] maps any point of the ball to a sparse vector of
//! barycentric weights over the support points. Points inside the hull use
//! their containing simplex. Points outside it use a virtual simplex formed
//! by a visible hull facet and the radial projection of the point onto the
//! sphere; the weight of that sphere vertex is reported separately and has no
//! support index.

use crate::error::{Error, Result};
use crate::geometry::{
    barycentric_solve, build_delaunay, clamp_coords, PointCloud, Triangulation, BARY_TOL,
    DUPLICATE_TOL,
};
use crate::scalar::{dist_sq, norm, Real};

pub const DEFAULT_RADIUS_MARGIN: f64 = 1.0;

/// Queries this close to the sphere still count as inside the closed ball.
pub const BALL_TOL: f64 = 1e-9;

/// Relaxed containment tolerance for the second pass over all hull facets.
pub const RELAXED_TOL: f64 = 1e-6;

/// Sparse barycentric embedding of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseXi<T> {
    /// `(support index, weight)`, ascending by index, zero weights omitted.
    pub entries: Vec<(usize, T)>,
    /// Weight of the sphere vertex; zero for queries inside the hull.
    pub sphere_mass: T,
    pub sphere_point: Option<Vec<T>>,
    /// Hull facet completing the virtual simplex, when one was used.
    pub facet_used: Option<Vec<usize>>,
}

impl<T: Real> SparseXi<T> {
    pub fn is_out_of_hull(&self) -> bool {
        self.facet_used.is_some()
    }

    pub fn total_mass(&self) -> T {
        self.entries.iter().map(|e| e.1).sum::<T>() + self.sphere_mass
    }

    pub fn get(&self, t: usize) -> T {
        self.entries
            .binary_search_by_key(&t, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// Dense `m`-vector of the support weights.
    pub fn to_dense(&self, m: usize) -> Vec<T> {
        let mut out = vec![T::zero(); m];
        for &(t, v) in &self.entries {
            out[t] = v;
        }
        out
    }

    fn from_pairs(ids: &[usize], coords: &[T], sphere: Option<(Vec<T>, T, Vec<usize>)>) -> Self {
        let mut entries: Vec<(usize, T)> = ids
            .iter()
            .copied()
            .zip(coords.iter().copied())
            .filter(|e| e.1 != T::zero())
            .collect();
        entries.sort_by_key(|e| e.0);
        match sphere {
            Some((point, mass, facet)) => SparseXi {
                entries,
                sphere_mass: mass,
                sphere_point: Some(point),
                facet_used: Some(facet),
            },
            None => SparseXi {
                entries,
                sphere_mass: T::zero(),
                sphere_point: None,
                facet_used: None,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingSpace<T> {
    centroid: Vec<T>,
    radius: T,
    /// Rows of the training set that became support points, in support order.
    support_rows: Vec<usize>,
    tri: Triangulation<T>,
}

/// Centres the training set, fixes `R = max norm + radius_margin`, and
/// triangulates the translated support points.
///
/// Support indices that repeat, or that point at coordinates already taken by
/// an earlier support point, are dropped (first occurrence wins).
pub fn fit_space<T: Real>(
    train_points: &PointCloud<T>,
    support_indices: &[usize],
    radius_margin: T,
) -> Result<EmbeddingSpace<T>> {
    if !(radius_margin > T::zero()) {
        return Err(Error::InvalidMargin(radius_margin.as_f64()));
    }
    if support_indices.is_empty() {
        return Err(Error::InvalidConfig("support set is empty".into()));
    }
    if let Some(&bad) = support_indices.iter().find(|&&i| i >= train_points.len()) {
        return Err(Error::InvalidConfig(format!(
            "support index {bad} out of range for {} training points",
            train_points.len()
        )));
    }
    let centroid = train_points.centroid();
    let translated = train_points.translated(&centroid);
    let radius = translated.max_norm() + radius_margin;

    let support_rows = dedup_rows(&translated, support_indices);
    if support_rows.len() < support_indices.len() {
        log::info!(
            "dropped {} repeated support points",
            support_indices.len() - support_rows.len()
        );
    }
    let support = translated.select(&support_rows);
    let tri = build_delaunay(&support)?;
    let space = EmbeddingSpace {
        centroid,
        radius,
        support_rows,
        tri,
    };
    if !space.origin_inside_hull() {
        log::warn!("the centroid of the training data is outside the support hull");
    }
    Ok(space)
}

fn dedup_rows<T: Real>(points: &PointCloud<T>, rows: &[usize]) -> Vec<usize> {
    let tol = T::lit(DUPLICATE_TOL);
    let tol2 = tol * tol;
    let mut kept: Vec<usize> = Vec::with_capacity(rows.len());
    for &r in rows {
        let p = points.point(r);
        if kept
            .iter()
            .all(|&k| k != r && dist_sq(points.point(k), p) >= tol2)
        {
            kept.push(r);
        }
    }
    kept
}

impl<T: Real> EmbeddingSpace<T> {
    /// Reassembles a space from stored parts.
    pub fn from_parts(
        centroid: Vec<T>,
        radius: T,
        support_rows: Vec<usize>,
        tri: Triangulation<T>,
    ) -> Result<Self> {
        if centroid.len() != tri.dim() {
            return Err(Error::DimensionMismatch {
                expected: tri.dim(),
                got: centroid.len(),
            });
        }
        if !(radius > tri.cloud().max_norm()) {
            return Err(Error::InvalidModel(
                "radius does not enclose the support points".into(),
            ));
        }
        Ok(EmbeddingSpace {
            centroid,
            radius,
            support_rows,
            tri,
        })
    }

    pub fn dim(&self) -> usize {
        self.tri.dim()
    }

    pub fn centroid(&self) -> &[T] {
        &self.centroid
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Translated support points `u^1..u^m`.
    pub fn support(&self) -> &PointCloud<T> {
        self.tri.cloud()
    }

    pub fn support_len(&self) -> usize {
        self.tri.cloud().len()
    }

    pub fn support_rows(&self) -> &[usize] {
        &self.support_rows
    }

    pub fn triangulation(&self) -> &Triangulation<T> {
        &self.tri
    }

    pub fn origin_inside_hull(&self) -> bool {
        self.tri.locate(&vec![T::zero(); self.dim()]).is_some()
    }

    pub fn translate(&self, x_raw: &[T]) -> Vec<T> {
        x_raw.iter().zip(&self.centroid).map(|(&a, &c)| a - c).collect()
    }

    /// Support point `t` back in original coordinates.
    pub fn support_original(&self, t: usize) -> Vec<T> {
        self.support()
            .point(t)
            .iter()
            .zip(&self.centroid)
            .map(|(&a, &c)| a + c)
            .collect()
    }

    /// `R x / |x|` for a translated point.
    pub fn project_to_sphere(&self, x: &[T]) -> Result<Vec<T>> {
        let len = norm(x);
        if len < T::lit(1e-12) {
            return Err(Error::ZeroNorm);
        }
        let s = self.radius / len;
        Ok(x.iter().map(|&v| v * s).collect())
    }

    /// Embedding of a point given in original coordinates.
    pub fn xi(&self, x_raw: &[T]) -> Result<SparseXi<T>> {
        if x_raw.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x_raw.len(),
            });
        }
        self.xi_translated(&self.translate(x_raw))
    }

    /// Embedding of a point already translated to the centred frame.
    pub fn xi_translated(&self, x: &[T]) -> Result<SparseXi<T>> {
        let len = norm(x);
        if len > self.radius + T::lit(BALL_TOL) {
            return Err(Error::OutsideBall {
                norm: len.as_f64(),
                radius: self.radius.as_f64(),
            });
        }
        match self.tri.locate(x) {
            Some((_, bary)) => Ok(SparseXi::from_pairs(
                &bary.simplex.vertex_ids,
                &bary.coords,
                None,
            )),
            None => self.xi_outside_hull(x),
        }
    }

    /// Embedding through a virtual simplex `<w^x, facet>`, skipping the
    /// interior search. Used for queries outside the hull.
    pub fn xi_outside_hull(&self, x: &[T]) -> Result<SparseXi<T>> {
        let w = self.project_to_sphere(x)?;
        // Facets the query sits exactly on count as visible here, so that the
        // hull boundary is approached continuously from outside.
        let scale = T::one() + norm(x);
        let visible = self.tri.weakly_visible_facets(x, T::tol(BARY_TOL) * scale);
        let all: Vec<usize> = (0..self.tri.boundary().len()).collect();

        let pick = self
            .best_virtual(&visible, x, &w, T::tol(BARY_TOL))
            .or_else(|| self.best_virtual(&all, x, &w, T::tol(RELAXED_TOL)));
        let (facet_idx, mut coords) = match pick {
            Some(found) => found,
            None => self.nearest_facet_fallback(x, &w)?,
        };
        clamp_coords(&mut coords, T::tol(RELAXED_TOL));
        let facet = &self.tri.boundary()[facet_idx].facet_ids;
        Ok(SparseXi::from_pairs(
            facet,
            &coords[1..],
            Some((w, coords[0], facet.clone())),
        ))
    }

    fn virtual_coords(&self, facet_idx: usize, x: &[T], w: &[T]) -> Option<Vec<T>> {
        let facet = &self.tri.boundary()[facet_idx];
        let mut verts: Vec<&[T]> = Vec::with_capacity(facet.facet_ids.len() + 1);
        verts.push(w);
        verts.extend(facet.facet_ids.iter().map(|&v| self.support().point(v)));
        barycentric_solve(&verts, x).ok()
    }

    /// Among `candidates`, the facet whose virtual simplex contains `x` with
    /// the largest minimum coordinate (lowest index on ties).
    fn best_virtual(
        &self,
        candidates: &[usize],
        x: &[T],
        w: &[T],
        tau: T,
    ) -> Option<(usize, Vec<T>)> {
        let mut best: Option<(usize, Vec<T>, T)> = None;
        for &f in candidates {
            let Some(coords) = self.virtual_coords(f, x, w) else {
                continue;
            };
            let min = coords.iter().copied().fold(T::infinity(), T::min);
            if min < -tau {
                continue;
            }
            if best.as_ref().is_none_or(|b| min > b.2) {
                best = Some((f, coords, min));
            }
        }
        best.map(|(f, c, _)| (f, c))
    }

    /// Last resort: the facet with the nearest vertex centroid, coordinates
    /// clamped to be nonnegative.
    fn nearest_facet_fallback(&self, x: &[T], w: &[T]) -> Result<(usize, Vec<T>)> {
        let n = T::from_usize(self.dim()).unwrap();
        let mut order: Vec<(usize, T)> = self
            .tri
            .boundary()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut c = vec![T::zero(); self.dim()];
                for &v in &f.facet_ids {
                    for (acc, &p) in c.iter_mut().zip(self.support().point(v)) {
                        *acc += p / n;
                    }
                }
                (i, dist_sq(&c, x))
            })
            .collect();
        order.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        for (f, _) in order {
            if let Some(mut coords) = self.virtual_coords(f, x, w) {
                coords.iter_mut().for_each(|c| *c = c.max(T::zero()));
                let s: T = coords.iter().copied().sum();
                if s > T::zero() {
                    coords.iter_mut().for_each(|c| *c /= s);
                    log::debug!("virtual simplex fallback used facet {f}");
                    return Ok((f, coords));
                }
            }
        }
        Err(Error::NoContainingVirtualSimplex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> EmbeddingSpace<f64> {
        let v = PointCloud::from_rows(&[[0.5, 0.5], [0.5, 1.0], [1.0, 0.5], [1.0, 1.0]]).unwrap();
        let mut s = fit_space(&v, &[0, 1, 2, 3], 1.0).unwrap();
        // The worked example fixes R = 1.
        s.radius = 1.0;
        s
    }

    #[test]
    fn centres_on_training_mean() {
        let s = example();
        assert_eq!(s.centroid(), &[0.75, 0.75]);
        assert_eq!(s.support().point(0), &[-0.25, -0.25]);
        assert_eq!(s.support().point(3), &[0.25, 0.25]);
        assert!(s.origin_inside_hull());
    }

    #[test]
    fn radius_is_max_norm_plus_margin() {
        let v = PointCloud::from_rows(&[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]).unwrap();
        let s = fit_space(&v, &[0, 1, 2], 1.0).unwrap();
        let max: f64 = v.translated(&[1.0, 1.0]).max_norm();
        assert!((s.radius() - (max + 1.0)).abs() < 1e-12);
        assert!(matches!(
            fit_space(&v, &[0, 1, 2], 0.0),
            Err(Error::InvalidMargin(_))
        ));
    }

    #[test]
    fn projection() {
        let s = example();
        assert_eq!(s.project_to_sphere(&[0.0, 0.5]).unwrap(), vec![0.0, 1.0]);
        let on = s.project_to_sphere(&[0.6, 0.8]).unwrap();
        assert!((on[0] - 0.6).abs() < 1e-15 && (on[1] - 0.8).abs() < 1e-15);
        assert!(matches!(
            s.project_to_sphere(&[0.0, 0.0]),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn xi_interior_example() {
        let s = example();
        let xi = s.xi(&[0.75, 0.6]).unwrap();
        assert_eq!(xi.sphere_mass, 0.0);
        let want = [(0, 0.3), (1, 0.2), (2, 0.5)];
        assert_eq!(xi.entries.len(), 3);
        for (got, w) in xi.entries.iter().zip(want) {
            assert_eq!(got.0, w.0);
            assert!((got.1 - w.1).abs() < 1e-12);
        }
    }

    #[test]
    fn xi_exterior_example() {
        let s = example();
        let xi = s.xi(&[0.75, 1.25]).unwrap();
        assert_eq!(xi.facet_used, Some(vec![1, 3]));
        assert!((xi.sphere_mass - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(xi.entries.len(), 2);
        assert_eq!(xi.entries[0].0, 1);
        assert_eq!(xi.entries[1].0, 3);
        for e in &xi.entries {
            assert!((e.1 - 1.0 / 3.0).abs() < 1e-12);
        }
        let w = xi.sphere_point.unwrap();
        assert!((w[0]).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_point_is_indicator() {
        let s = example();
        let xi = s.xi(&[1.0, 0.5]).unwrap();
        assert_eq!(xi.entries, vec![(2, 1.0)]);
        assert_eq!(xi.sphere_mass, 0.0);
    }

    #[test]
    fn outside_ball_rejected() {
        let s = example();
        assert!(matches!(
            s.xi(&[0.75, 1.75 + 1e-6]),
            Err(Error::OutsideBall { .. })
        ));
        // On the sphere itself is fine.
        let xi = s.xi(&[0.75, 1.75]).unwrap();
        assert!((xi.total_mass() - 1.0).abs() < 1e-12);
        assert!((xi.sphere_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_point_agrees_between_paths() {
        let s = example();
        let x = [0.1, 0.25];
        let inside = s.xi_translated(&x).unwrap();
        assert!(!inside.is_out_of_hull());
        let outside = s.xi_outside_hull(&x).unwrap();
        assert!(outside.sphere_mass.abs() < 1e-7);
        for t in 0..4 {
            assert!((inside.get(t) - outside.get(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn repeated_support_rows_are_dropped() {
        let v = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = fit_space(&v, &[0, 1, 2, 3, 1], 1.0).unwrap();
        assert_eq!(s.support_rows(), &[0, 1, 2]);
    }
}
