//! Shortest closed paths in the curve × mesh product graph.
//!
//! A matching of the `m`-point curve onto the mesh is a path from layer 0 to
//! layer `m` that starts and ends at the same mesh vertex. Edges either stay
//! in a layer (the curve point stretches over a mesh edge) or advance one
//! layer (vertically, or diagonally to a mesh neighbor). The product graph is
//! never materialized.

mod dijkstra;
mod graph;

use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Solver;
use crate::cost::CostMatrix;
use crate::geometry::GeodesicProvider;
use crate::heap::MinItem;
use crate::{Curve2D, Error, Result, TriMesh};
use dijkstra::{shortest_open_path, Workspace};
use graph::Problem;
pub use graph::{edge_cost, neighbors, ProductVertex};

/// Ordered product-graph path and the sum of its edge costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPath {
    pub vertices: Vec<ProductVertex>,
    pub energy: f64,
}

impl MatchPath {
    pub fn start(&self) -> ProductVertex {
        self.vertices[0]
    }

    pub fn end(&self) -> ProductVertex {
        *self.vertices.last().expect("nonempty path")
    }

    pub fn is_closed(&self) -> bool {
        self.start().j == self.end().j
    }

    /// Checks endpoints and edge rules for an `m`-point curve. Open paths
    /// (different endpoint vertices) are accepted unless `closed` is set.
    pub fn validate(&self, m: usize, mesh: &TriMesh, closed: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let (Some(first), Some(last)) = (self.vertices.first(), self.vertices.last()) else {
            return bad("empty path".into());
        };
        if first.i != 0 || last.i != m {
            return bad(format!("path runs from layer {} to {}, expected 0 to {m}", first.i, last.i));
        }
        if closed && first.j != last.j {
            return bad(format!("path is not closed: {} != {}", first.j, last.j));
        }
        if let Some(v) = self.vertices.iter().find(|v| v.j >= mesh.n_vertices()) {
            return bad(format!("vertex {} out of range", v.j));
        }
        let mut advances = 0;
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let adjacent = mesh.is_adjacent(a.j, b.j);
            let ok = (b.i == a.i && a.i < m && adjacent) || (b.i == a.i + 1 && (a.j == b.j || adjacent));
            if !ok {
                return Err(Error::NotAnEdge(a.i, a.j, b.i, b.j));
            }
            advances += b.i - a.i;
        }
        debug_assert_eq!(advances, m);
        Ok(())
    }

    /// Sum of edge costs along the path, accumulated in path order.
    pub fn recompute_energy(&self, d: &CostMatrix, curve: &Curve2D, mesh: &TriMesh) -> Result<f64> {
        self.vertices
            .windows(2)
            .try_fold(0.0, |acc, w| Ok(acc + edge_cost(w[0], w[1], d, curve, mesh)?))
    }

    /// Mesh vertices matched to each curve vertex, in path order and without
    /// repeats. Layer `m` counts as curve vertex 0.
    pub fn correspondences(&self, m: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); m];
        for v in &self.vertices {
            let group = &mut out[v.i % m];
            if !group.contains(&v.j) {
                group.push(v.j);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchStats {
    /// Shortest-path solves (region solves for branch-and-bound).
    pub paths_solved: usize,
    pub heap_pops: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub path: MatchPath,
    pub correspondences: Vec<Vec<usize>>,
    pub stats: MatchStats,
}

#[derive(Serialize, Deserialize)]
struct MatchResultJson {
    energy: f64,
    path: Vec<ProductVertex>,
    correspondences: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stats: Option<MatchStats>,
}

impl MatchResult {
    fn new(path: MatchPath, m: usize, stats: MatchStats) -> Self {
        let correspondences = path.correspondences(m);
        Self {
            path,
            correspondences,
            stats,
        }
    }

    pub fn energy(&self) -> f64 {
        self.path.energy
    }

    /// JSON object `{energy, path, correspondences[, stats]}`.
    pub fn to_json(&self, with_stats: bool) -> String {
        let j = MatchResultJson {
            energy: self.path.energy,
            path: self.path.vertices.clone(),
            correspondences: self.correspondences.clone(),
            stats: with_stats.then(|| self.stats.clone()),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: MatchResultJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Self {
            path: MatchPath {
                vertices: j.path,
                energy: j.energy,
            },
            correspondences: j.correspondences,
            stats: j.stats.unwrap_or_default(),
        })
    }
}

/// A set of candidate start vertices with a lower bound on the energy of any
/// closed path starting in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionNode {
    pub region: Vec<usize>,
    pub bound: f64,
}

fn check_region(region: &[usize], n: usize) -> Result<Vec<usize>> {
    if region.is_empty() {
        return Err(Error::InvalidArgument("empty start region".into()));
    }
    if let Some(&v) = region.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidArgument(format!("region vertex {v} out of range")));
    }
    let mut r = region.to_vec();
    r.sort_unstable();
    r.dedup();
    Ok(r)
}

/// Cheapest path from `{0} × R` to `{m} × R`; its endpoints may differ.
pub fn shortest_path_region(region: &[usize], d: &CostMatrix, curve: &Curve2D, mesh: &TriMesh) -> Result<MatchPath> {
    let p = Problem::new(d, curve, mesh)?;
    let region = check_region(region, p.n)?;
    let open = shortest_open_path(&p, &region, &mut Workspace::default());
    Ok(MatchPath {
        vertices: open.vertices,
        energy: open.energy,
    })
}

/// Global optimum by one constrained solve per start vertex, run in
/// parallel. Ties go to the smallest start vertex.
pub fn exhaustive_match(d: &CostMatrix, curve: &Curve2D, mesh: &TriMesh) -> Result<MatchResult> {
    let started = Instant::now();
    let p = Problem::new(d, curve, mesh)?;
    let runs: Vec<(f64, usize, u64, Vec<ProductVertex>)> = (0..p.n)
        .into_par_iter()
        .map_init(Workspace::default, |ws, j| {
            let open = shortest_open_path(&p, &[j], ws);
            (open.energy, j, open.heap_pops, open.vertices)
        })
        .collect();
    let heap_pops = runs.iter().map(|r| r.2).sum();
    let (energy, _, _, vertices) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("mesh has vertices");
    let stats = MatchStats {
        paths_solved: p.n,
        heap_pops,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok(MatchResult::new(MatchPath { vertices, energy }, p.m, stats))
}

/// Branch-and-bound over start regions with open-path lower bounds.
pub fn branch_and_bound_match(
    d: &CostMatrix,
    curve: &Curve2D,
    mesh: &TriMesh,
    geodesics: &dyn GeodesicProvider,
) -> Result<MatchResult> {
    branch_and_bound_traced(d, curve, mesh, geodesics).map(|(r, _)| r)
}

/// [`branch_and_bound_match`] that also returns every processed region with
/// its bound, in processing order.
pub fn branch_and_bound_traced(
    d: &CostMatrix,
    curve: &Curve2D,
    mesh: &TriMesh,
    geodesics: &dyn GeodesicProvider,
) -> Result<(MatchResult, Vec<RegionNode>)> {
    let started = Instant::now();
    let p = Problem::new(d, curve, mesh)?;
    let mut ws = Workspace::default();
    let mut nodes: Vec<Option<RegionNode>> = vec![Some(RegionNode {
        region: (0..p.n).collect(),
        bound: 0.0,
    })];
    let mut queue = BinaryHeap::from([MinItem { key: 0.0, index: 0 }]);
    let mut incumbent = f64::INFINITY;
    let mut best: Option<MatchPath> = None;
    let mut trace = Vec::new();
    let mut stats = MatchStats::default();

    while let Some(&MinItem { key: bound, index }) = queue.peek() {
        if bound >= incumbent {
            break;
        }
        queue.pop();
        let node = nodes[index].take().expect("each node is processed once");
        let open = shortest_open_path(&p, &node.region, &mut ws);
        stats.paths_solved += 1;
        stats.heap_pops += open.heap_pops;
        let (a, b) = (open.vertices[0].j, open.vertices.last().expect("nonempty").j);
        let length = open.energy;
        trace.push(node.clone());
        if a == b {
            if length < incumbent {
                incumbent = length;
                best = Some(MatchPath {
                    vertices: open.vertices,
                    energy: length,
                });
            }
            continue;
        }
        if length >= incumbent {
            continue;
        }
        let (da, db) = (geodesics.distances(a), geodesics.distances(b));
        let (r1, r2): (Vec<usize>, Vec<usize>) = node.region.iter().partition(|&&x| da[x] <= db[x]);
        for region in [r1, r2] {
            let index = nodes.len();
            nodes.push(Some(RegionNode { region, bound: length }));
            queue.push(MinItem { key: length, index });
        }
    }
    stats.wall_time_s = started.elapsed().as_secs_f64();
    let path = best.expect("the search always closes some path");
    Ok((MatchResult::new(path, p.m, stats), trace))
}

/// Dispatch on [`Solver`].
pub fn solve(
    solver: Solver,
    d: &CostMatrix,
    curve: &Curve2D,
    mesh: &TriMesh,
    geodesics: &dyn GeodesicProvider,
) -> Result<MatchResult> {
    match solver {
        Solver::Bnb => branch_and_bound_match(d, curve, mesh, geodesics),
        Solver::Exhaustive => exhaustive_match(d, curve, mesh),
    }
}
