use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::TriMesh;
use crate::heap::MinItem;

/// Meshes up to this size get the exact all-sources diameter by default.
pub const EXACT_DIAMETER_MAX_VERTICES: usize = 2000;

/// Single-source shortest-path distances over the mesh edge graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicField {
    pub source: usize,
    pub dist: Vec<f64>,
}

impl GeodesicField {
    pub fn max(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Vertex with the largest distance (smallest index on ties).
    pub fn farthest(&self) -> usize {
        let mut best = 0;
        for (v, &d) in self.dist.iter().enumerate() {
            if d > self.dist[best] {
                best = v;
            }
        }
        best
    }
}

/// Dijkstra from `source` with Euclidean edge lengths.
///
/// # Panics
/// If `source` is not a vertex of `mesh`.
pub fn geodesic_distances(mesh: &TriMesh, source: usize) -> GeodesicField {
    assert!(source < mesh.n_vertices(), "source {source} out of range");
    GeodesicField {
        source,
        dist: dijkstra(mesh, &[source]),
    }
}

pub(crate) fn dijkstra(mesh: &TriMesh, sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; mesh.n_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(MinItem { key: 0.0, index: s });
    }
    while let Some(MinItem { key, index: v }) = heap.pop() {
        if key > dist[v] {
            continue;
        }
        for (&w, &len) in mesh.neighbors(v).iter().zip(mesh.neighbor_lengths(v)) {
            let nd = key + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(MinItem { key: nd, index: w });
            }
        }
    }
    dist
}

/// Geodesic diameter of the edge graph.
///
/// With `exact`, the maximum over all n single-source runs. Otherwise the
/// maximum over ⌈√n⌉ farthest-point-sampled sources starting at vertex 0,
/// which is a lower bound on the exact value.
pub fn geodesic_diameter(mesh: &TriMesh, exact: bool) -> f64 {
    let n = mesh.n_vertices();
    if exact {
        return (0..n)
            .into_par_iter()
            .map(|s| dijkstra(mesh, &[s]).into_iter().fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
    }
    let samples = (n as f64).sqrt().ceil() as usize;
    let mut nearest = vec![f64::INFINITY; n];
    let mut source = 0;
    let mut diameter: f64 = 0.0;
    for _ in 0..samples {
        let field = geodesic_distances(mesh, source);
        diameter = diameter.max(field.max());
        for (m, d) in nearest.iter_mut().zip(&field.dist) {
            *m = m.min(*d);
        }
        source = (0..n)
            .max_by(|&a, &b| nearest[a].total_cmp(&nearest[b]).then(b.cmp(&a)))
            .unwrap_or(0);
    }
    diameter
}

/// Exact for meshes up to [`EXACT_DIAMETER_MAX_VERTICES`], sampled above.
pub fn geodesic_diameter_auto(mesh: &TriMesh) -> f64 {
    geodesic_diameter(mesh, mesh.n_vertices() <= EXACT_DIAMETER_MAX_VERTICES)
}

/// Source of per-vertex geodesic distance fields on a fixed mesh.
pub trait GeodesicProvider: Sync {
    fn distances(&self, source: usize) -> Arc<Vec<f64>>;
}

/// Lazily computed, memoized single-source fields.
pub struct GeodesicCache<'a> {
    mesh: &'a TriMesh,
    fields: Mutex<HashMap<usize, Arc<Vec<f64>>>>,
}

impl<'a> GeodesicCache<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        GeodesicCache {
            mesh,
            fields: Mutex::new(HashMap::new()),
        }
    }
}

impl GeodesicProvider for GeodesicCache<'_> {
    fn distances(&self, source: usize) -> Arc<Vec<f64>> {
        if let Some(f) = self.fields.lock().unwrap().get(&source) {
            return Arc::clone(f);
        }
        let field = Arc::new(dijkstra(self.mesh, &[source]));
        self.fields
            .lock()
            .unwrap()
            .entry(source)
            .or_insert(field)
            .clone()
    }
}
