use std::collections::HashMap;

use super::{dist3, triangle_area3};
use crate::{Error, Result};

/// Connected, edge-manifold triangle mesh with derived edge graph.
///
/// Adjacency is stored in CSR form with each neighbor list sorted ascending,
/// so every traversal over it is deterministic.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    adj_offsets: Vec<usize>,
    adj: Vec<usize>,
    adj_len: Vec<f64>,
    dropped_faces: usize,
}

impl TriMesh {
    /// Builds a mesh, dropping zero-area faces.
    ///
    /// Fails when an index is out of range, an edge has more than two faces,
    /// or the edge graph is not connected over all vertices.
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidMesh(format!("{n} vertices")));
        }
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidMesh(format!("non-finite vertex {v:?}")));
        }
        if let Some(f) = faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::InvalidMesh(format!("face {f:?} indexes past {n} vertices")));
        }

        let scale2 = bbox_diagonal(&vertices).powi(2);
        let total = faces.len();
        let faces: Vec<[usize; 3]> = faces
            .into_iter()
            .filter(|&[a, b, c]| {
                a != b
                    && b != c
                    && a != c
                    && triangle_area3(vertices[a], vertices[b], vertices[c]) > 1e-14 * scale2
            })
            .collect();
        let dropped_faces = total - faces.len();
        if dropped_faces > 0 {
            log::warn!("dropped {dropped_faces} zero-area faces");
        }
        if faces.is_empty() {
            return Err(Error::InvalidMesh("no non-degenerate faces".into()));
        }

        let mut edge_faces: HashMap<[usize; 2], usize> = HashMap::new();
        for f in &faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edge_faces.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(edge_faces.len());
        for (&e, &count) in &edge_faces {
            if count > 2 {
                return Err(Error::NonManifold(e[0], e[1], count));
            }
            edges.push(e);
        }
        edges.sort_unstable();

        let mut degree = vec![0usize; n];
        for &[a, b] in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut adj_offsets = vec![0usize; n + 1];
        for v in 0..n {
            adj_offsets[v + 1] = adj_offsets[v] + degree[v];
        }
        let mut fill = adj_offsets[..n].to_vec();
        let mut adj = vec![0usize; adj_offsets[n]];
        for &[a, b] in &edges {
            adj[fill[a]] = b;
            fill[a] += 1;
            adj[fill[b]] = a;
            fill[b] += 1;
        }
        for v in 0..n {
            adj[adj_offsets[v]..adj_offsets[v + 1]].sort_unstable();
        }
        let adj_len = (0..n)
            .flat_map(|v| {
                let p = vertices[v];
                adj[adj_offsets[v]..adj_offsets[v + 1]]
                    .iter()
                    .map(|&w| dist3(p, vertices[w]))
                    .collect::<Vec<_>>()
            })
            .collect();

        let mesh = TriMesh {
            vertices,
            faces,
            edges,
            adj_offsets,
            adj,
            adj_len,
            dropped_faces,
        };
        let components = mesh.component_count();
        if components != 1 {
            return Err(Error::Disconnected(components));
        }
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> [f64; 3] {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Undirected edges `[a, b]` with `a < b`, sorted.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Number of zero-area faces removed at construction.
    pub fn dropped_faces(&self) -> usize {
        self.dropped_faces
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    /// Euclidean lengths of the edges to [`Self::neighbors`], in the same order.
    pub fn neighbor_lengths(&self, v: usize) -> &[f64] {
        &self.adj_len[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_offsets[v + 1] - self.adj_offsets[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        triangle_area3(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_faces()).map(|f| self.face_area(f)).sum()
    }

    /// Boundary edges (edges with a single incident face), sorted.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let mut out: Vec<_> = count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        out.sort_unstable();
        out
    }

    /// Copy with every vertex mapped through `f`; connectivity is unchanged.
    pub fn map_vertices(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<TriMesh> {
        TriMesh::new(self.vertices.iter().map(|&v| f(v)).collect(), self.faces.clone())
    }

    pub fn scaled(&self, s: f64) -> TriMesh {
        self.map_vertices(|v| [v[0] * s, v[1] * s, v[2] * s])
            .expect("uniform scaling preserves mesh validity")
    }

    fn component_count(&self) -> usize {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut components = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }
}

fn bbox_diagonal(vertices: &[[f64; 3]]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in vertices {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    dist3(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn tetrahedron_counts() {
        let t = synthetic::tetrahedron();
        assert_eq!((t.n_vertices(), t.n_edges(), t.n_faces()), (4, 6, 4));
        for v in 0..4 {
            assert_eq!(t.degree(v), 3);
        }
        assert!(t.boundary_edges().is_empty());
    }

    #[test]
    fn icosahedron_euler() {
        let m = synthetic::icosahedron();
        let (v, e, f) = (m.n_vertices() as i64, m.n_edges() as i64, m.n_faces() as i64);
        assert_eq!(f, 20);
        assert_eq!(v - e + f, 2);
        assert_eq!((v, e), (12, 30));
    }

    #[test]
    fn zero_area_faces_dropped() {
        let t = synthetic::tetrahedron();
        let mut faces = t.faces().to_vec();
        faces.push([0, 0, 1]);
        let m = TriMesh::new(t.vertices().to_vec(), faces).unwrap();
        assert_eq!(m.dropped_faces(), 1);
        assert_eq!(m.n_faces(), 4);
    }

    #[test]
    fn disjoint_tetrahedra_rejected() {
        let t = synthetic::tetrahedron();
        let mut verts = t.vertices().to_vec();
        verts.extend(t.vertices().iter().map(|v| [v[0] + 5.0, v[1], v[2]]));
        let mut faces = t.faces().to_vec();
        faces.extend(t.faces().iter().map(|f| [f[0] + 4, f[1] + 4, f[2] + 4]));
        assert!(matches!(TriMesh::new(verts, faces), Err(Error::Disconnected(2))));
    }

    #[test]
    fn three_faces_on_an_edge_rejected() {
        let verts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert!(matches!(TriMesh::new(verts, faces), Err(Error::NonManifold(0, 1, 3))));
    }

    #[test]
    fn out_of_range_index_rejected() {
        let verts = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(TriMesh::new(verts, vec![[0, 1, 3]]).is_err());
    }
}
