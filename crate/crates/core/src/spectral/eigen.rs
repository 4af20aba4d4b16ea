use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LaplacianPair;
use crate::{Error, Result};

/// Problems up to this size are solved densely under [`EigenSolver::Auto`].
pub const DENSE_MAX_VERTICES: usize = 300;

const MAX_ITERATIONS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-10;
const STALL_TOL: f64 = 1e-7;

/// Truncated generalized eigendecomposition `K ψ = λ M ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    /// Ascending, non-negative.
    pub eigenvalues: Vec<f64>,
    /// n × k, column j is ψ_j; `ψᵀ M ψ = I`.
    pub eigenfunctions: DMatrix<f64>,
    pub mass: Vec<f64>,
}

impl SpectralBasis {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    /// Copy restricted to the first `k` eigenpairs.
    pub fn truncated(&self, k: usize) -> SpectralBasis {
        let k = k.min(self.k());
        SpectralBasis {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            eigenfunctions: self.eigenfunctions.columns(0, k).into_owned(),
            mass: self.mass.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenSolver {
    /// Dense up to [`DENSE_MAX_VERTICES`], shift-invert above.
    #[default]
    Auto,
    Dense,
    ShiftInvert,
}

/// The `k` smallest eigenpairs of `(stiffness, mass)`.
pub fn eigendecompose(lap: &LaplacianPair, k: usize) -> Result<SpectralBasis> {
    eigendecompose_with(lap, k, EigenSolver::Auto)
}

/// Like [`eigendecompose`] with an explicit solver. [`EigenSolver::Dense`]
/// also accepts `k = n`.
pub fn eigendecompose_with(lap: &LaplacianPair, k: usize, solver: EigenSolver) -> Result<SpectralBasis> {
    let n = lap.n();
    // The dense path may return the full spectrum.
    let limit = if solver == EigenSolver::Dense { n + 1 } else { n };
    if k == 0 || k >= limit {
        return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    let (mut values, ys) = match solver {
        EigenSolver::Dense => dense(lap, k),
        EigenSolver::ShiftInvert => shift_invert(lap, k)?,
        EigenSolver::Auto if n <= DENSE_MAX_VERTICES => dense(lap, k),
        EigenSolver::Auto => shift_invert(lap, k)?,
    };
    // ψ = M^{-1/2} y, then fix signs and polish eigenvalues with the
    // Rayleigh quotient.
    let mut psi = ys;
    for (i, &m) in lap.mass.iter().enumerate() {
        let s = 1.0 / m.sqrt();
        psi.row_mut(i).scale_mut(s);
    }
    let top = values[k - 1].abs().max(f64::MIN_POSITIVE);
    for (j, value) in values.iter_mut().enumerate().take(k) {
        let mut col = psi.column_mut(j);
        let amax = col.amax();
        if let Some(first) = col.iter().position(|v| v.abs() > 1e-10 * amax) {
            if col[first] < 0.0 {
                col.neg_mut();
            }
        }
        let col = psi.column(j).into_owned();
        let kpsi = &lap.stiffness * &col;
        let rq = col.dot(&kpsi);
        *value = if rq.abs() <= 1e-12 * top { rq.max(0.0) } else { rq };
    }
    Ok(SpectralBasis {
        eigenvalues: values,
        eigenfunctions: psi,
        mass: lap.mass.clone(),
    })
}

/// Symmetric standard form `A = M^{-1/2} K M^{-1/2}`, solved densely.
fn dense(lap: &LaplacianPair, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = lap.n();
    let s: Vec<f64> = lap.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in lap.stiffness.triplet_iter() {
        a[(i, j)] += s[i] * v * s[j];
    }
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Shift-invert block Krylov iteration with Rayleigh–Ritz restarts.
///
/// Works on `B = M^{1/2} (K - σM)^{-1} M^{1/2}` with a small negative shift,
/// whose largest eigenvalues `1/(λ - σ)` belong to the smallest λ. Each outer
/// step builds the block Krylov space `[Y, BY, B²Y]` and restarts from the
/// best Ritz vectors; blocks wider than any eigenvalue multiplicity of
/// interest resolve degenerate clusters.
fn shift_invert(lap: &LaplacianPair, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = lap.n();
    let q = (k + (k / 2).max(10)).min(n);
    let sqrt_m: Vec<f64> = lap.mass.iter().map(|m| m.sqrt()).collect();

    // Weyl's law puts λ_{k-1} near 4πk/area; a shift a hundred times smaller
    // keeps B well conditioned on the wanted band.
    let sigma = -4.0 * std::f64::consts::PI * k as f64 / lap.total_mass() / 100.0;

    let perm = reverse_cuthill_mckee(lap);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut coo = CooMatrix::new(n, n);
    for (i, j, v) in lap.stiffness.triplet_iter() {
        let shifted = if i == j { v - sigma * lap.mass[i] } else { *v };
        coo.push(inv[i], inv[j], shifted);
    }
    let chol = CscCholesky::factor(&CscMatrix::from(&coo))
        .map_err(|e| Error::NumericalDegeneracy(format!("shifted Laplacian factorization failed: {e:?}")))?;

    let apply = |y: &DMatrix<f64>| -> DMatrix<f64> {
        let cols = y.ncols();
        let mut rhs = DMatrix::zeros(n, cols);
        for i in 0..n {
            for c in 0..cols {
                rhs[(inv[i], c)] = sqrt_m[i] * y[(i, c)];
            }
        }
        let x = chol.solve(&rhs);
        DMatrix::from_fn(n, cols, |i, c| sqrt_m[i] * x[(inv[i], c)])
    };

    // Residuals cannot drop below round-off in A = M^{-1/2} K M^{-1/2}.
    let mut row_abs = vec![0.0; n];
    for (i, j, v) in lap.stiffness.triplet_iter() {
        row_abs[i] += v.abs() / (sqrt_m[i] * sqrt_m[j]);
    }
    let norm_a = row_abs.iter().copied().fold(0.0, f64::max);
    let floor = 1e4 * f64::EPSILON * norm_a;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut y = DMatrix::from_fn(n, q, |_, _| rng.gen_range(-1.0..1.0));
    let mut worst = f64::INFINITY;
    let mut best_residual = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..MAX_ITERATIONS {
        let v1 = orthonormalize(&y, None);
        let w1 = apply(&v1);
        let v2 = orthonormalize(&w1, Some(&v1));
        let w2 = apply(&v2);
        let basis12 = hcat(&v1, &v2);
        let v3 = orthonormalize(&w2, Some(&basis12));
        let w3 = apply(&v3);
        let basis = hcat(&basis12, &v3);
        let image = hcat(&hcat(&w1, &w2), &w3);

        let h = basis.transpose() * &image;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let keep = q.min(order.len());
        if keep < k {
            return Err(Error::NumericalDegeneracy("Krylov space collapsed".into()));
        }
        let s = DMatrix::from_fn(basis.ncols(), keep, |r, c| eig.eigenvectors[(r, order[c])]);
        let z = &basis * s;

        // Rayleigh–Ritz against A itself on the retained block.
        let az = apply_a(lap, &sqrt_m, &z);
        let ha = z.transpose() * &az;
        let ha = (&ha + ha.transpose()) * 0.5;
        let eig = SymmetricEigen::new(ha);
        let mut order: Vec<usize> = (0..keep).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let s = DMatrix::from_fn(keep, keep, |r, c| eig.eigenvectors[(r, order[c])]);
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        y = &z * &s;
        let ay = az * s;

        let tol = (RESIDUAL_TOL * values[k - 1].abs()).max(floor);
        worst = (0..k)
            .map(|j| (ay.column(j) - y.column(j) * values[j]).norm())
            .fold(0.0, f64::max);
        // Stagnation above the target but within the eigenpair contract
        // still counts as converged.
        let stalled = worst > 0.5 * best_residual && worst <= STALL_TOL * values[k - 1].abs();
        stalls = if stalled { stalls + 1 } else { 0 };
        best_residual = best_residual.min(worst);
        if worst <= tol || stalls >= 5 {
            let vectors = y.columns(0, k).into_owned();
            return Ok((values[..k].to_vec(), vectors));
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: MAX_ITERATIONS,
        residual: worst,
    })
}

/// `A Y` with `A = M^{-1/2} K M^{-1/2}`.
fn apply_a(lap: &LaplacianPair, sqrt_m: &[f64], y: &DMatrix<f64>) -> DMatrix<f64> {
    let psi = DMatrix::from_fn(y.nrows(), y.ncols(), |i, c| y[(i, c)] / sqrt_m[i]);
    let kpsi = &lap.stiffness * &psi;
    DMatrix::from_fn(y.nrows(), y.ncols(), |i, c| kpsi[(i, c)] / sqrt_m[i])
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Columns of `x` orthonormalized against `against` and each other
/// (classical Gram–Schmidt, two passes). Dependent columns are dropped.
fn orthonormalize(x: &DMatrix<f64>, against: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(x.ncols());
    for c in 0..x.ncols() {
        let mut v = x.column(c).into_owned();
        let before = v.norm();
        if before == 0.0 {
            continue;
        }
        for _ in 0..2 {
            if let Some(q) = against {
                let coef = q.tr_mul(&v);
                v -= q * coef;
            }
            for u in &kept {
                let d = u.dot(&v);
                v.axpy(-d, u, 1.0);
            }
        }
        let after = v.norm();
        if after > 1e-10 * before {
            kept.push(v / after);
        }
    }
    let n = x.nrows();
    let mut out = DMatrix::zeros(n, kept.len());
    for (c, v) in kept.iter().enumerate() {
        out.set_column(c, v);
    }
    out
}

/// Bandwidth-reducing vertex order of the stiffness sparsity graph.
fn reverse_cuthill_mckee(lap: &LaplacianPair) -> Vec<usize> {
    let n = lap.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in lap.stiffness.triplet_iter() {
        if i != j {
            adj[i].push(j);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let bfs = |start: usize, visited: &mut Vec<bool>| -> Vec<usize> {
        let mut order = vec![start];
        visited[start] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
        order
    };
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if visited[s] {
            continue;
        }
        // Pseudo-peripheral start: last vertex of a BFS from s.
        let mut probe = visited.clone();
        let far = *bfs(s, &mut probe).last().unwrap_or(&s);
        order.extend(bfs(far, &mut visited));
    }
    order.reverse();
    order
}
