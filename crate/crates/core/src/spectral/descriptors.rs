use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpectralBasis;
use crate::geometry::PlanarSolidMesh;
use crate::{Error, Result};

/// Width of the WKS Gaussians relative to the energy spacing.
pub const WKS_SIGMA_FACTOR: f64 = 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescriptorKind {
    Hks,
    Wks,
}

/// Per-vertex descriptor rows, stored row-major as `n × d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorField {
    pub kind: DescriptorKind,
    pub n: usize,
    pub d: usize,
    pub values: Vec<f64>,
}

impl DescriptorField {
    pub fn new(kind: DescriptorKind, n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "descriptor field {n}x{d} needs {} values, got {}",
                n * d,
                values.len()
            )));
        }
        Ok(Self { kind, n, d, values })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d.max(1))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// New field made of the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> DescriptorField {
        let mut values = Vec::with_capacity(rows.len() * self.d);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        DescriptorField {
            kind: self.kind,
            n: rows.len(),
            d: self.d,
            values,
        }
    }

    fn normalize_max(&mut self) {
        let max = self.max();
        if max > 0.0 && max.is_finite() {
            for v in &mut self.values {
                *v /= max;
            }
        }
    }
}

/// `d` log-spaced diffusion times in `[4 ln 10 / λ_{k-1}, 4 ln 10 / λ_1]`.
pub fn hks_times(eigenvalues: &[f64], d: usize) -> Vec<f64> {
    let k = eigenvalues.len();
    let c = 4.0 * std::f64::consts::LN_10;
    let lo = (c / eigenvalues[k - 1]).ln();
    let hi = (c / eigenvalues[1]).ln();
    log_grid(lo, hi, d).into_iter().map(f64::exp).collect()
}

/// `d` log-energies spaced uniformly in `[log λ_1, log λ_{k-1}]`.
pub fn wks_energies(eigenvalues: &[f64], d: usize) -> Vec<f64> {
    let k = eigenvalues.len();
    log_grid(eigenvalues[1].ln(), eigenvalues[k - 1].ln(), d)
}

fn log_grid(lo: f64, hi: f64, d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![lo];
    }
    (0..d).map(|i| lo + (hi - lo) * i as f64 / (d - 1) as f64).collect()
}

/// Unscaled `k_t(x, x) = Σ_j exp(-λ_j t) ψ_j(x)²` at a single time.
pub fn heat_kernel_diagonal(basis: &SpectralBasis, t: f64) -> Vec<f64> {
    let w: Vec<f64> = basis.eigenvalues.iter().map(|l| (-l * t).exp()).collect();
    (0..basis.n())
        .map(|x| {
            (0..basis.k())
                .map(|j| w[j] * basis.eigenfunctions[(x, j)].powi(2))
                .sum()
        })
        .collect()
}

/// Scaled heat kernel signature: each time slice divided by its integral
/// over the surface, then the whole field divided by its maximum.
pub fn compute_hks(basis: &SpectralBasis, d: usize) -> Result<DescriptorField> {
    if d == 0 || basis.k() < 2 {
        return Err(Error::InvalidArgument(format!("HKS needs d >= 1 and k >= 2, got d={d}, k={}", basis.k())));
    }
    let times = hks_times(&basis.eigenvalues, d);
    // weights[t][j] = exp(-λ_j t) / Σ_j exp(-λ_j t); ψ is mass-orthonormal,
    // so the denominator is the slice integral.
    let weights: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| {
            let w: Vec<f64> = basis.eigenvalues.iter().map(|l| (-l * t).exp()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        })
        .collect();
    Ok(evaluate(basis, DescriptorKind::Hks, &weights))
}

/// Wave kernel signature with Gaussian energy filters normalized to unit
/// sum, then max-normalized.
pub fn compute_wks(basis: &SpectralBasis, d: usize) -> Result<DescriptorField> {
    let k = basis.k();
    if d == 0 || k < 3 {
        return Err(Error::InvalidArgument(format!("WKS needs d >= 1 and k >= 3, got d={d}, k={k}")));
    }
    let energies = wks_energies(&basis.eigenvalues, d);
    let log_l: Vec<f64> = basis.eigenvalues.iter().map(|l| l.ln()).collect();
    let span = log_l[k - 1] - log_l[1];
    // A flat spectrum (all nonzero eigenvalues equal) has zero span.
    let sigma = (WKS_SIGMA_FACTOR * span / d as f64).max(1e-6);
    let weights: Vec<Vec<f64>> = energies
        .iter()
        .map(|&e| {
            let mut w = vec![0.0; k];
            for j in 1..k {
                w[j] = (-(e - log_l[j]).powi(2) / (2.0 * sigma * sigma)).exp();
            }
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        })
        .collect();
    Ok(evaluate(basis, DescriptorKind::Wks, &weights))
}

/// `out[x][t] = Σ_j weights[t][j] ψ_j(x)²`, max-normalized.
fn evaluate(basis: &SpectralBasis, kind: DescriptorKind, weights: &[Vec<f64>]) -> DescriptorField {
    let (n, k, d) = (basis.n(), basis.k(), weights.len());
    let mut values = vec![0.0; n * d];
    values.par_chunks_mut(d).enumerate().for_each(|(x, row)| {
        let sq: Vec<f64> = (0..k).map(|j| basis.eigenfunctions[(x, j)].powi(2)).collect();
        for (out, w) in row.iter_mut().zip(weights) {
            *out = w.iter().zip(&sq).map(|(a, b)| a * b).sum();
        }
    });
    let mut field = DescriptorField { kind, n, d, values };
    field.normalize_max();
    field
}

/// Rows of a solid-mesh field at the curve vertices.
pub fn restrict_to_boundary(field: &DescriptorField, solid: &PlanarSolidMesh) -> Result<DescriptorField> {
    if let Some(&bad) = solid.boundary_map.iter().find(|&&v| v >= field.n) {
        return Err(Error::DimensionMismatch(format!(
            "boundary vertex {bad} outside field with {} rows",
            field.n
        )));
    }
    Ok(field.select_rows(&solid.boundary_map))
}
