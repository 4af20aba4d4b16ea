//! Spectral region labels and the 2D-to-3D region assignment.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::spectral::{DescriptorField, SpectralBasis};
use crate::{Error, Result, TriMesh};

pub const MIN_REGIONS: usize = 2;
pub const MAX_REGIONS: usize = 16;
const KMEANS_MAX_ITERATIONS: usize = 200;

/// One label in `0..r` per vertex; every region nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SegmentLabels {
    labels: Vec<usize>,
    r: usize,
}

impl SegmentLabels {
    pub fn new(labels: Vec<usize>, r: usize) -> Result<Self> {
        let mut seen = vec![false; r];
        for &l in &labels {
            if l >= r {
                return Err(Error::DegenerateSegmentation(format!("label {l} out of range 0..{r}")));
            }
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::DegenerateSegmentation(format!("region {empty} is empty")));
        }
        Ok(Self { labels, r })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels mapped through `perm` (old label `l` becomes `perm[l]`).
    pub fn relabeled(&self, perm: &[usize]) -> SegmentLabels {
        SegmentLabels {
            labels: self.labels.iter().map(|&l| perm[l]).collect(),
            r: self.r,
        }
    }

    /// Labels at the given vertices. The result may not use every label.
    pub fn select(&self, vertices: &[usize]) -> Vec<usize> {
        vertices.iter().map(|&v| self.labels[v]).collect()
    }
}

impl TryFrom<Vec<usize>> for SegmentLabels {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        let r = labels.iter().max().map_or(0, |m| m + 1);
        SegmentLabels::new(labels, r)
    }
}

impl From<SegmentLabels> for Vec<usize> {
    fn from(s: SegmentLabels) -> Self {
        s.labels
    }
}

/// Bijection from 2D region labels to 3D region labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionAssignment {
    pub perm: Vec<usize>,
    pub cost: f64,
}

/// Sorted neighbor lists of a triangle soup.
pub fn face_adjacency(n: usize, faces: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

pub fn mesh_adjacency(mesh: &TriMesh) -> Vec<Vec<usize>> {
    (0..mesh.n_vertices()).map(|v| mesh.neighbors(v).to_vec()).collect()
}

/// Spectral k-means segmentation into `r` connected regions.
///
/// Vertices are embedded as `[ψ_1/√λ_1, …, ψ_r/√λ_r]` and clustered with
/// Lloyd iterations (mass-weighted centroids). Seeds are chosen by
/// farthest-point sampling, starting from the vertex farthest from the
/// embedding's centroid. Afterwards every label keeps only its largest
/// connected component; the other components join the label they share the
/// most edges with.
pub fn segment_shape(basis: &SpectralBasis, adjacency: &[Vec<usize>], r: usize) -> Result<SegmentLabels> {
    let n = basis.n();
    if !(MIN_REGIONS..=MAX_REGIONS).contains(&r) {
        return Err(Error::InvalidArgument(format!("r must be in {MIN_REGIONS}..={MAX_REGIONS}, got {r}")));
    }
    if basis.k() < r || r > n {
        return Err(Error::InvalidArgument(format!(
            "segmentation into {r} regions needs k >= r and n >= r (k={}, n={n})",
            basis.k()
        )));
    }
    if adjacency.len() != n {
        return Err(Error::DimensionMismatch(format!("adjacency for {} vertices, basis for {n}", adjacency.len())));
    }
    let dims = r.min(basis.k() - 1);
    let emb: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            (1..=dims)
                .map(|j| basis.eigenfunctions[(v, j)] / basis.eigenvalues[j].sqrt())
                .collect()
        })
        .collect();
    let labels = kmeans(&emb, &basis.mass, r);
    let labels = repair_connectivity(labels, adjacency, r)?;
    SegmentLabels::new(labels, r)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

fn kmeans(emb: &[Vec<f64>], mass: &[f64], r: usize) -> Vec<usize> {
    let n = emb.len();
    let dim = emb[0].len();
    let total: f64 = mass.iter().sum();
    let centroid: Vec<f64> = (0..dim)
        .map(|c| emb.iter().zip(mass).map(|(e, m)| e[c] * m).sum::<f64>() / total)
        .collect();

    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(r);
    let first = argmax(emb.iter().map(|e| sq_dist(e, &centroid)));
    centers.push(emb[first].clone());
    let mut nearest: Vec<f64> = emb.iter().map(|e| sq_dist(e, &centers[0])).collect();
    while centers.len() < r {
        let next = argmax(nearest.iter().copied());
        centers.push(emb[next].clone());
        for (d, e) in nearest.iter_mut().zip(emb) {
            *d = d.min(sq_dist(e, &emb[next]));
        }
    }

    let mut labels = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITERATIONS {
        let mut changed = false;
        for (v, e) in emb.iter().enumerate() {
            let mut best = (0, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(e, center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            if labels[v] != best.0 {
                labels[v] = best.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; r];
        let mut weights = vec![0.0; r];
        for (v, e) in emb.iter().enumerate() {
            weights[labels[v]] += mass[v];
            for (s, x) in sums[labels[v]].iter_mut().zip(e) {
                *s += mass[v] * x;
            }
        }
        for c in 0..r {
            if weights[c] > 0.0 {
                centers[c] = sums[c].iter().map(|s| s / weights[c]).collect();
            } else {
                // Empty cluster: reseed at the worst-fitted vertex.
                let worst = argmax(emb.iter().enumerate().map(|(v, e)| sq_dist(e, &centers[labels[v]])));
                centers[c] = emb[worst].clone();
            }
        }
    }
    labels
}

/// Connected components of each label, as (label, vertices) pairs.
fn label_components(labels: &[usize], adjacency: &[Vec<usize>]) -> Vec<(usize, Vec<usize>)> {
    let n = labels.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !seen[w] && labels[w] == labels[s] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comps.push((labels[s], comp));
    }
    comps
}

fn repair_connectivity(mut labels: Vec<usize>, adjacency: &[Vec<usize>], r: usize) -> Result<Vec<usize>> {
    loop {
        let comps = label_components(&labels, adjacency);
        // Largest component per label; ties go to the one found first.
        let mut keep = vec![usize::MAX; r];
        for (ci, (l, comp)) in comps.iter().enumerate() {
            if keep[*l] == usize::MAX || comp.len() > comps[keep[*l]].1.len() {
                keep[*l] = ci;
            }
        }
        if let Some(empty) = keep.iter().position(|&k| k == usize::MAX) {
            return Err(Error::DegenerateSegmentation(format!("region {empty} is empty")));
        }
        let strays: Vec<usize> = (0..comps.len()).filter(|ci| keep[comps[*ci].0] != *ci).collect();
        if strays.is_empty() {
            return Ok(labels);
        }
        // Reassign the smallest stray component, then recompute.
        let ci = *strays.iter().min_by_key(|&&ci| (comps[ci].1.len(), ci)).expect("nonempty");
        let (own, comp) = &comps[ci];
        let mut votes = vec![0usize; r];
        for &v in comp {
            for &w in &adjacency[v] {
                if labels[w] != *own {
                    votes[labels[w]] += 1;
                }
            }
        }
        let target = (0..r).max_by_key(|&l| (votes[l], std::cmp::Reverse(l))).expect("r > 0");
        if votes[target] == 0 {
            return Err(Error::DegenerateSegmentation("isolated component has no neighbors".into()));
        }
        for &v in comp {
            labels[v] = target;
        }
    }
}

/// Mass-weighted mean of `[HKS | WKS]` rows over each region (`r × 2d`).
pub fn region_signatures(
    labels: &SegmentLabels,
    hks: &DescriptorField,
    wks: &DescriptorField,
    mass: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = labels.len();
    if hks.n != n || wks.n != n || mass.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "labels {n}, hks {}, wks {}, mass {}",
            hks.n,
            wks.n,
            mass.len()
        )));
    }
    let width = hks.d + wks.d;
    let mut sums = vec![vec![0.0; width]; labels.r()];
    let mut weights = vec![0.0; labels.r()];
    for (v, &mv) in mass.iter().enumerate().take(n) {
        let l = labels.label(v);
        weights[l] += mv;
        let row = hks.row(v).iter().chain(wks.row(v));
        for (s, x) in sums[l].iter_mut().zip(row) {
            *s += mv * x;
        }
    }
    for (s, w) in sums.iter_mut().zip(&weights) {
        for x in s.iter_mut() {
            *x /= w;
        }
    }
    Ok(sums)
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Minimum-cost perfect assignment of a square matrix. Among optimal
/// assignments the lexicographically smallest permutation is returned.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<RegionAssignment> {
    let r = cost.len();
    if cost.iter().any(|row| row.len() != r) {
        return Err(Error::DimensionMismatch("assignment cost matrix is not square".into()));
    }
    if cost.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("assignment cost matrix has non-finite entries".into()));
    }
    if r == 0 {
        return Ok(RegionAssignment { perm: vec![], cost: 0.0 });
    }
    let (_, best) = solve_assignment(cost);
    let scale = cost.iter().flatten().fold(0.0f64, |a, c| a.max(c.abs())).max(1.0);
    let tol = 1e-12 * scale * r as f64;

    // Fix rows one at a time to the smallest column that still admits an
    // optimal completion.
    let mut perm = vec![usize::MAX; r];
    let mut used = vec![false; r];
    let mut fixed_cost = 0.0;
    for row in 0..r {
        let free_rows: Vec<usize> = (row + 1..r).collect();
        for col in 0..r {
            if used[col] {
                continue;
            }
            let free_cols: Vec<usize> = (0..r).filter(|&c| !used[c] && c != col).collect();
            let sub: Vec<Vec<f64>> = free_rows
                .iter()
                .map(|&i| free_cols.iter().map(|&j| cost[i][j]).collect())
                .collect();
            let rest = if sub.is_empty() { 0.0 } else { solve_assignment(&sub).1 };
            if fixed_cost + cost[row][col] + rest <= best + tol {
                perm[row] = col;
                used[col] = true;
                fixed_cost += cost[row][col];
                break;
            }
        }
    }
    let total = (0..r).map(|i| cost[i][perm[i]]).sum();
    Ok(RegionAssignment { perm, cost: total })
}

/// Shortest augmenting path Hungarian method with potentials, O(r³).
fn solve_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let r = cost.len();
    // 1-based arrays; column 0 is a virtual start.
    let mut u = vec![0.0; r + 1];
    let mut v = vec![0.0; r + 1];
    let mut p = vec![0usize; r + 1];
    let mut way = vec![0usize; r + 1];
    for i in 1..=r {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; r + 1];
        let mut used = vec![false; r + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=r {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=r {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; r];
    for j in 1..=r {
        perm[p[j] - 1] = j - 1;
    }
    let total = (0..r).map(|i| cost[i][perm[i]]).sum();
    (perm, total)
}

/// Pairwise L1 distances between 2D and 3D region signatures.
pub fn signature_costs(sig2d: &[Vec<f64>], sig3d: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if sig2d.len() != sig3d.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} regions", sig2d.len(), sig3d.len())));
    }
    if let Some(row) = sig2d.iter().chain(sig3d).find(|s| s.len() != sig2d[0].len()) {
        return Err(Error::DimensionMismatch(format!("signature width {} vs {}", row.len(), sig2d[0].len())));
    }
    Ok(sig2d.iter().map(|a| sig3d.iter().map(|b| l1(a, b)).collect()).collect())
}

/// Region correspondence minimizing the total L1 signature distance.
pub fn assign_regions(sig2d: &[Vec<f64>], sig3d: &[Vec<f64>]) -> Result<RegionAssignment> {
    hungarian(&signature_costs(sig2d, sig3d)?)
}
