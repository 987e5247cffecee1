//! Incremental Delaunay construction in arbitrary dimension.
//!
//! The triangulation is maintained together with one extra vertex at
//! infinity, so every `(n-1)`-face has exactly two incident cells and the
//! convex hull grows naturally when a point lands outside it. This is the
//! lower convex hull of the points lifted to the paraboloid `z = |p|^2`, with
//! the infinite cells playing the role of the vertical hull facets.
//!
//! Everything here runs in `f64` on a normalised copy of the input (centred,
//! scaled to unit diameter). Co-spherical ties are broken by raising the
//! lifted height of point `i` by a tiny, strictly convex function of `i`, so
//! the result is a regular triangulation with generic weights. Coordinates are
//! never moved, which keeps coplanar inputs from producing flat cells. Only
//! the combinatorics leave this module.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{cond1, Lu};
use crate::scalar::{dist_sq, dot};

use super::simplex::{facet_hyperplane, MAX_CONDITION};

const INF: usize = usize::MAX;

/// Largest lift offset, in units of the squared diameter.
pub(crate) const PERTURBATION: f64 = 1e-10;

/// Points closer than this (absolute) are duplicates.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Normalised distance below which a point is considered to lie on a hull
/// facet hyperplane.
const COPLANAR_TOL: f64 = 1e-12;

/// Normalised affine-span distance below which the input is degenerate.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Cell {
    verts: Vec<usize>,
    /// `nbrs[i]` is the cell across the face opposite `verts[i]`.
    nbrs: Vec<usize>,
    alive: bool,
    kind: CellKind,
}

#[derive(Debug, Clone)]
enum CellKind {
    /// Power sphere: `p` conflicts iff `|p - center|^2 + lift(p) < r2`.
    Finite {
        center: Vec<f64>,
        r2: f64,
    },
    /// Hull facet hyperplane (outward) and the facet's own power sphere inside
    /// that hyperplane. Filled in once neighbours are linked.
    Infinite {
        plane: Option<(Vec<f64>, f64)>,
        facet_sphere: Option<(Vec<f64>, f64)>,
    },
    /// Flat cell produced by an unresolved degeneracy; never in conflict.
    Flat,
}

/// Combinatorial output: finite simplices and hull facets with the vertex of
/// their unique incident simplex that is not on the facet.
#[derive(Debug, Clone)]
pub(crate) struct RawTriangulation {
    pub simplices: Vec<Vec<usize>>,
    pub boundary: Vec<(Vec<usize>, usize)>,
}

pub(crate) fn triangulate(dim: usize, coords: &[f64]) -> Result<RawTriangulation> {
    let m = coords.len() / dim;
    if m < dim + 1 {
        return Err(Error::DimensionTooSmall {
            dim,
            needed: dim + 1,
            got: m,
        });
    }
    let pt = |i: usize| &coords[i * dim..(i + 1) * dim];

    let mut diameter = 0.0_f64;
    for i in 0..m {
        for j in i + 1..m {
            let d2 = dist_sq(pt(i), pt(j));
            if d2 < DUPLICATE_TOL * DUPLICATE_TOL {
                return Err(Error::DuplicatePoint {
                    first: i,
                    second: j,
                });
            }
            diameter = diameter.max(d2);
        }
    }
    let diameter = diameter.sqrt();

    let mut centroid = vec![0.0; dim];
    for i in 0..m {
        for (c, v) in centroid.iter_mut().zip(pt(i)) {
            *c += v / m as f64;
        }
    }
    let work: Vec<f64> = (0..m)
        .flat_map(|i| {
            let centroid = &centroid;
            pt(i).iter().zip(centroid).map(move |(v, c)| (v - c) / diameter)
        })
        .collect();

    let seed = initial_simplex(dim, &work)?;
    let mut builder = Builder::new(dim, work, lift_offsets(m));
    builder.seed(&seed)?;
    for i in 0..m {
        if seed.contains(&i) {
            continue;
        }
        if !builder.insert(i) {
            log::warn!("point {i} was not inserted into the triangulation");
        }
    }
    Ok(builder.finish())
}

/// `PERTURBATION * g(i) / g(m - 1)` with `g(i) = (i + 1) ln(i + 1)`.
///
/// Strict convexity makes a later point lose a four-point tie, so the
/// square `0, 1, 2, 3` splits along the diagonal `1-2`.
fn lift_offsets(m: usize) -> Vec<f64> {
    let g = |i: usize| {
        let x = (i + 1) as f64;
        x * x.ln()
    };
    let top = g(m - 1).max(f64::MIN_POSITIVE);
    (0..m).map(|i| PERTURBATION * g(i) / top).collect()
}

/// Greedy choice of `dim + 1` affinely independent points: start from point
/// 0 and repeatedly add the point farthest from the current affine span.
fn initial_simplex(dim: usize, work: &[f64]) -> Result<Vec<usize>> {
    let m = work.len() / dim;
    let pt = |i: usize| &work[i * dim..(i + 1) * dim];
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let origin = pt(0).to_vec();
    while chosen.len() < dim + 1 {
        let mut best = (0usize, -1.0_f64, Vec::new());
        for i in 0..m {
            let mut r: Vec<f64> = pt(i).iter().zip(&origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let p = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
            let d = dot(&r, &r).sqrt();
            if d > best.1 {
                best = (i, d, r);
            }
        }
        if best.1 < DEGENERATE_TOL {
            return Err(Error::DegenerateSupport { dim });
        }
        let inv = 1.0 / best.1;
        basis.push(best.2.iter().map(|v| v * inv).collect());
        chosen.push(best.0);
    }
    Ok(chosen)
}

struct Builder {
    dim: usize,
    work: Vec<f64>,
    lift: Vec<f64>,
    cells: Vec<Cell>,
    // scratch
    mark: Vec<u32>,
    stamp: u32,
}

impl Builder {
    fn new(dim: usize, work: Vec<f64>, lift: Vec<f64>) -> Self {
        Builder {
            dim,
            work,
            lift,
            cells: Vec::new(),
            mark: Vec::new(),
            stamp: 0,
        }
    }

    fn pt(&self, i: usize) -> &[f64] {
        &self.work[i * self.dim..(i + 1) * self.dim]
    }

    fn make_cell(&self, verts: Vec<usize>) -> Cell {
        let kind = if verts.contains(&INF) {
            CellKind::Infinite {
                plane: None,
                facet_sphere: None,
            }
        } else {
            match self.power_sphere(&verts, true) {
                Some((center, r2)) => CellKind::Finite { center, r2 },
                None => CellKind::Flat,
            }
        };
        Cell {
            nbrs: vec![INF; verts.len()],
            verts,
            alive: true,
            kind,
        }
    }

    fn seed(&mut self, seed: &[usize]) -> Result<()> {
        let n = self.dim;
        let finite = self.make_cell(seed.to_vec());
        if matches!(finite.kind, CellKind::Flat) {
            return Err(Error::DegenerateSupport { dim: n });
        }
        self.cells.push(finite);
        for i in 0..=n {
            let mut verts = seed.to_vec();
            verts[i] = INF;
            let cell = self.make_cell(verts);
            self.cells.push(cell);
            self.cells[0].nbrs[i] = i + 1;
            self.cells[i + 1].nbrs[i] = 0;
        }
        // Infinite cells pair up across faces that contain the infinite vertex.
        for a in 1..=n + 1 {
            for b in a + 1..=n + 1 {
                // cell a has INF at a-1, cell b has INF at b-1; they share every
                // vertex except seed[a-1] (in b) and seed[b-1] (in a).
                self.cells[a].nbrs[b - 1] = b;
                self.cells[b].nbrs[a - 1] = a;
            }
        }
        for c in 1..=n + 1 {
            self.update_infinite(c);
        }
        self.mark = vec![0; self.cells.len()];
        Ok(())
    }

    /// Computes the hull-facet hyperplane of an infinite cell from its finite
    /// neighbour across the finite facet.
    fn update_infinite(&mut self, c: usize) {
        let inf_pos = self.cells[c].verts.iter().position(|&v| v == INF).unwrap();
        let facet: Vec<usize> = self.cells[c]
            .verts
            .iter()
            .copied()
            .filter(|&v| v != INF)
            .collect();
        let nb = self.cells[c].nbrs[inf_pos];
        let opposite = self.cells[nb]
            .verts
            .iter()
            .copied()
            .find(|v| !facet.contains(v))
            .unwrap();
        let fpts: Vec<&[f64]> = facet.iter().map(|&v| self.pt(v)).collect();
        let plane = facet_hyperplane(&fpts, self.pt(opposite));
        let facet_sphere = self.power_sphere(&facet, false);
        self.cells[c].kind = CellKind::Infinite {
            plane,
            facet_sphere,
        };
    }

    /// Centre and squared radius of the sphere with equal power
    /// `|x - c|^2 + lift` at every vertex, within the vertices' affine hull.
    /// `full` asks for a full-dimensional cell and rejects ill-conditioned
    /// ones.
    fn power_sphere(&self, verts: &[usize], full: bool) -> Option<(Vec<f64>, f64)> {
        let base = self.pt(verts[0]);
        let l0 = self.lift[verts[0]];
        let k = verts.len() - 1;
        if k == 0 {
            return Some((base.to_vec(), l0));
        }
        let edges: Vec<Vec<f64>> = verts[1..]
            .iter()
            .map(|&v| self.pt(v).iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        // d = c - base = sum_i lambda_i e_i with 2 e_j . d = |e_j|^2 + lift_j - lift_0
        let mut gram = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                gram[i * k + j] = 2.0 * dot(&edges[i], &edges[j]);
            }
            rhs[i] = dot(&edges[i], &edges[i]) + self.lift[verts[i + 1]] - l0;
        }
        if full && !(cond1(&gram, k) <= MAX_CONDITION * MAX_CONDITION) {
            return None;
        }
        let lambda = Lu::new(&gram, k).solve(&rhs)?;
        let mut center = base.to_vec();
        for (l, e) in lambda.iter().zip(&edges) {
            center.iter_mut().zip(e).for_each(|(c, v)| *c += l * v);
        }
        let r2 = dist_sq(&center, base) + l0;
        r2.is_finite().then_some((center, r2))
    }

    fn in_conflict(&self, c: usize, p: &[f64], lift: f64) -> bool {
        let cell = &self.cells[c];
        match &cell.kind {
            CellKind::Finite { center, r2 } => dist_sq(p, center) + lift < *r2,
            CellKind::Infinite {
                plane,
                facet_sphere,
            } => {
                let Some((normal, offset)) = plane else {
                    return false;
                };
                let side = dot(normal, p) + offset;
                if side > COPLANAR_TOL {
                    true
                } else if side >= -COPLANAR_TOL {
                    facet_sphere
                        .as_ref()
                        .is_some_and(|(center, r2)| dist_sq(p, center) + lift < *r2)
                } else {
                    false
                }
            }
            CellKind::Flat => false,
        }
    }

    fn insert(&mut self, idx: usize) -> bool {
        let n = self.dim;
        let p = self.pt(idx).to_vec();
        let lift = self.lift[idx];

        let Some(start) = (0..self.cells.len())
            .find(|&c| self.cells[c].alive && self.in_conflict(c, &p, lift))
        else {
            return false;
        };

        self.stamp += 1;
        let stamp = self.stamp;
        if self.mark.len() < self.cells.len() {
            self.mark.resize(self.cells.len(), 0);
        }
        let mut cavity = vec![start];
        self.mark[start] = stamp;
        let mut head = 0;
        while head < cavity.len() {
            let c = cavity[head];
            head += 1;
            for i in 0..=n {
                let nb = self.cells[c].nbrs[i];
                if self.mark[nb] != stamp && self.in_conflict(nb, &p, lift) {
                    self.mark[nb] = stamp;
                    cavity.push(nb);
                }
            }
        }

        // One new cell per horizon face: the conflict cell with the vertex
        // across the face replaced by the new point.
        let mut created = Vec::new();
        for &c in &cavity {
            for i in 0..=n {
                let outside = self.cells[c].nbrs[i];
                if self.mark[outside] == stamp {
                    continue;
                }
                let mut verts = self.cells[c].verts.clone();
                verts[i] = idx;
                let mut cell = self.make_cell(verts);
                cell.nbrs[i] = outside;
                let id = self.cells.len();
                self.cells.push(cell);
                let back = self.cells[outside]
                    .nbrs
                    .iter()
                    .position(|&x| x == c)
                    .expect("neighbour link");
                self.cells[outside].nbrs[back] = id;
                created.push((id, i));
            }
        }

        // Link the new cells to each other across faces through the new point.
        let mut ridges: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &(id, pos) in &created {
            for j in 0..=n {
                if j == pos {
                    continue;
                }
                let mut key: Vec<usize> = self.cells[id]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                if let Some((other, other_j)) = ridges.remove(&key) {
                    self.cells[id].nbrs[j] = other;
                    self.cells[other].nbrs[other_j] = id;
                } else {
                    ridges.insert(key, (id, j));
                }
            }
        }
        debug_assert!(ridges.is_empty(), "cavity boundary is not closed");

        for &c in &cavity {
            self.cells[c].alive = false;
        }
        for &(id, _) in &created {
            if self.cells[id].verts.contains(&INF) {
                self.update_infinite(id);
            }
        }
        self.mark.resize(self.cells.len(), 0);
        true
    }

    fn finish(self) -> RawTriangulation {
        let mut simplices = Vec::new();
        let mut boundary = Vec::new();
        for cell in self.cells.iter().filter(|c| c.alive) {
            match cell.verts.iter().position(|&v| v == INF) {
                None => {
                    let mut v = cell.verts.clone();
                    v.sort_unstable();
                    simplices.push(v);
                }
                Some(inf_pos) => {
                    let mut facet: Vec<usize> =
                        cell.verts.iter().copied().filter(|&v| v != INF).collect();
                    facet.sort_unstable();
                    let nb = &self.cells[cell.nbrs[inf_pos]];
                    let opposite = nb
                        .verts
                        .iter()
                        .copied()
                        .find(|v| !facet.contains(v))
                        .unwrap();
                    boundary.push((facet, opposite));
                }
            }
        }
        simplices.sort();
        boundary.sort();
        RawTriangulation {
            simplices,
            boundary,
        }
    }
}
