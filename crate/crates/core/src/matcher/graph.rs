use serde::{Deserialize, Serialize};

use crate::cost::CostMatrix;
use crate::{Curve2D, Error, Result, TriMesh};

/// Vertex `(i, j)` of the product graph: curve layer `i ∈ 0..=m`, mesh
/// vertex `j`. Layer `m` is a second copy of layer 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct ProductVertex {
    pub i: usize,
    pub j: usize,
}

impl ProductVertex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl From<[usize; 2]> for ProductVertex {
    fn from([i, j]: [usize; 2]) -> Self {
        Self { i, j }
    }
}

impl From<ProductVertex> for [usize; 2] {
    fn from(v: ProductVertex) -> Self {
        [v.i, v.j]
    }
}

/// Successors of `v`: same-layer mesh neighbors, then `(i+1, j)`, then
/// `(i+1, neighbor)`. Layer `m` has no successors.
pub fn neighbors(v: ProductVertex, mesh: &TriMesh, m: usize) -> Vec<ProductVertex> {
    if v.i >= m {
        return Vec::new();
    }
    let nb = mesh.neighbors(v.j);
    let mut out = Vec::with_capacity(2 * nb.len() + 1);
    out.extend(nb.iter().map(|&w| ProductVertex::new(v.i, w)));
    out.push(ProductVertex::new(v.i + 1, v.j));
    out.extend(nb.iter().map(|&w| ProductVertex::new(v.i + 1, w)));
    out
}

#[inline]
pub(crate) fn sq2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

#[inline]
pub(crate) fn sq3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    dx * dx + dy * dy + dz * dz
}

/// Trapezoidal cost of one product edge given the endpoint feature distances
/// and the squared 2D and 3D displacements.
#[inline]
pub(crate) fn segment_cost(da: f64, db: f64, sq_2d: f64, sq_3d: f64) -> f64 {
    0.5 * (da + db) * (sq_2d + sq_3d).sqrt()
}

/// Cost of the product edge `a → b`: the mean of the two endpoint feature
/// distances times the Euclidean length of the edge in ℝ² × ℝ³.
pub fn edge_cost(a: ProductVertex, b: ProductVertex, d: &CostMatrix, curve: &Curve2D, mesh: &TriMesh) -> Result<f64> {
    let m = curve.len();
    let n = mesh.n_vertices();
    let in_range = |v: ProductVertex| v.i <= m && v.j < n;
    let same_j_ok = a.j == b.j || mesh.is_adjacent(a.j, b.j);
    let valid = in_range(a)
        && in_range(b)
        && a.i < m
        && d.m() == m
        && d.n() == n
        && ((b.i == a.i && a.j != b.j && mesh.is_adjacent(a.j, b.j)) || (b.i == a.i + 1 && same_j_ok));
    if !valid {
        return Err(Error::NotAnEdge(a.i, a.j, b.i, b.j));
    }
    let (ai, bi) = (a.i % m, b.i % m);
    Ok(segment_cost(
        d.get(ai, a.j),
        d.get(bi, b.j),
        sq2(curve.point(ai), curve.point(bi)),
        sq3(mesh.vertex(a.j), mesh.vertex(b.j)),
    ))
}

/// Borrowed inputs of one matching problem with the per-edge squared
/// lengths laid out for the solvers.
pub(crate) struct Problem<'a> {
    pub d: &'a CostMatrix,
    pub mesh: &'a TriMesh,
    pub m: usize,
    pub n: usize,
    /// `seg_sq[i]` = squared length of curve segment `i → i+1 (mod m)`.
    pub seg_sq: Vec<f64>,
    /// Squared 3D length per adjacency entry, aligned with `mesh.neighbors`.
    pub nb_offsets: Vec<usize>,
    pub nb_sq: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(d: &'a CostMatrix, curve: &Curve2D, mesh: &'a TriMesh) -> Result<Self> {
        let (m, n) = (curve.len(), mesh.n_vertices());
        if d.m() != m || d.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "cost matrix is {}x{}, shapes need {m}x{n}",
                d.m(),
                d.n()
            )));
        }
        let seg_sq = (0..m).map(|i| sq2(curve.point(i), curve.point(i + 1))).collect();
        let mut nb_offsets = Vec::with_capacity(n + 1);
        let mut nb_sq = Vec::new();
        nb_offsets.push(0);
        for v in 0..n {
            let p = mesh.vertex(v);
            nb_sq.extend(mesh.neighbors(v).iter().map(|&w| sq3(p, mesh.vertex(w))));
            nb_offsets.push(nb_sq.len());
        }
        Ok(Self {
            d,
            mesh,
            m,
            n,
            seg_sq,
            nb_offsets,
            nb_sq,
        })
    }

    #[inline]
    pub fn neighbors(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.nb_offsets[j]..self.nb_offsets[j + 1];
        (self.mesh.neighbors(j), &self.nb_sq[r])
    }
}
