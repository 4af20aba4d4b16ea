use std::collections::BinaryHeap;

use super::graph::{segment_cost, Problem};
use super::ProductVertex;
use crate::heap::MinItem;

const NO_PARENT: u32 = u32::MAX;
const SAME_LAYER: u32 = 1 << 31;

/// Reusable buffers for repeated solves on one problem.
#[derive(Default)]
pub(crate) struct Workspace {
    prev: Vec<f64>,
    cur: Vec<f64>,
    settled: Vec<bool>,
    parent: Vec<u32>,
    target: Vec<bool>,
    heap: BinaryHeap<MinItem>,
}

pub(crate) struct OpenPath {
    pub energy: f64,
    pub vertices: Vec<ProductVertex>,
    pub heap_pops: u64,
}

/// Shortest path from any `(0, j)`, `j ∈ sources`, to any `(m, j')`,
/// `j' ∈ sources`.
///
/// Layers are processed in order: layer `i` is seeded through the vertical
/// and diagonal edges from the finished layer `i - 1`, then closed under
/// same-layer edges with its own Dijkstra heap. Equal keys pop in ascending
/// mesh-vertex order.
pub(crate) fn shortest_open_path(p: &Problem<'_>, sources: &[usize], ws: &mut Workspace) -> OpenPath {
    let (m, n, d) = (p.m, p.n, p.d);
    ws.prev.clear();
    ws.prev.resize(n, f64::INFINITY);
    ws.cur.clear();
    ws.cur.resize(n, f64::INFINITY);
    ws.parent.clear();
    ws.parent.resize((m + 1) * n, NO_PARENT);
    ws.target.clear();
    ws.target.resize(n, false);
    for &j in sources {
        ws.target[j] = true;
        ws.cur[j] = 0.0;
    }
    let mut pops = 0u64;

    let mut end = None;
    for i in 0..=m {
        if i > 0 {
            std::mem::swap(&mut ws.prev, &mut ws.cur);
            ws.cur.fill(f64::INFINITY);
            let (ia, ib) = (i - 1, i % m);
            let (row_a, row_b) = (d.row(ia), d.row(ib));
            let seg = p.seg_sq[ia];
            let parents = &mut ws.parent[i * n..(i + 1) * n];
            for j in 0..n {
                let base = ws.prev[j];
                if base == f64::INFINITY {
                    continue;
                }
                let da = row_a[j];
                let c = base + segment_cost(da, row_b[j], seg, 0.0);
                if c < ws.cur[j] {
                    ws.cur[j] = c;
                    parents[j] = j as u32;
                }
                let (nb, sq) = p.neighbors(j);
                for (&w, &l) in nb.iter().zip(sq) {
                    let c = base + segment_cost(da, row_b[w], seg, l);
                    if c < ws.cur[w] {
                        ws.cur[w] = c;
                        parents[w] = j as u32;
                    }
                }
            }
        }

        // Same-layer closure.
        let row = d.row(i % m);
        ws.settled.clear();
        ws.settled.resize(n, false);
        ws.heap.clear();
        ws.heap.extend(
            ws.cur
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_finite())
                .map(|(index, &key)| MinItem { key, index }),
        );
        let parents = &mut ws.parent[i * n..(i + 1) * n];
        while let Some(MinItem { key, index: j }) = ws.heap.pop() {
            pops += 1;
            if ws.settled[j] || key > ws.cur[j] {
                continue;
            }
            ws.settled[j] = true;
            if i == m {
                // Layer m has no outgoing edges.
                if ws.target[j] {
                    end = Some(j);
                    break;
                }
                continue;
            }
            let dj = row[j];
            let (nb, sq) = p.neighbors(j);
            for (&w, &l) in nb.iter().zip(sq) {
                if ws.settled[w] {
                    continue;
                }
                let c = key + segment_cost(dj, row[w], 0.0, l);
                if c < ws.cur[w] {
                    ws.cur[w] = c;
                    parents[w] = j as u32 | SAME_LAYER;
                    ws.heap.push(MinItem { key: c, index: w });
                }
            }
        }
    }

    let end = end.expect("product graph of a connected mesh reaches every target");
    let energy = ws.cur[end];
    let mut vertices = Vec::with_capacity(m + 1);
    let mut v = ProductVertex::new(m, end);
    loop {
        vertices.push(v);
        let pp = ws.parent[v.i * n + v.j];
        if pp == NO_PARENT {
            break;
        }
        v = if pp & SAME_LAYER != 0 {
            ProductVertex::new(v.i, (pp & !SAME_LAYER) as usize)
        } else {
            ProductVertex::new(v.i - 1, pp as usize)
        };
    }
    vertices.reverse();
    OpenPath {
        energy,
        vertices,
        heap_pops: pops,
    }
}
