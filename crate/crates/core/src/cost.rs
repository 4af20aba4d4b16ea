//! Feature distance between curve and mesh vertices, and the dense cost
//! matrix consumed by the matcher.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::DescriptorField;
use crate::{Error, Result};

/// Penalty for matching points in different regions.
pub const DEFAULT_TAU: f64 = 1e3;

/// Per-vertex descriptors of one shape plus optional region labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureField {
    pub hks: DescriptorField,
    pub wks: DescriptorField,
    pub segments: Option<Vec<usize>>,
}

impl FeatureField {
    pub fn new(hks: DescriptorField, wks: DescriptorField, segments: Option<Vec<usize>>) -> Result<Self> {
        if hks.n != wks.n || segments.as_ref().is_some_and(|s| s.len() != hks.n) {
            return Err(Error::DimensionMismatch(format!(
                "hks has {} rows, wks {}, segments {:?}",
                hks.n,
                wks.n,
                segments.as_ref().map(Vec::len)
            )));
        }
        Ok(Self { hks, wks, segments })
    }

    pub fn len(&self) -> usize {
        self.hks.n
    }

    pub fn is_empty(&self) -> bool {
        self.hks.n == 0
    }

    pub fn segment(&self, v: usize) -> Option<usize> {
        self.segments.as_ref().map(|s| s[v])
    }

    pub fn without_segments(&self) -> FeatureField {
        FeatureField {
            segments: None,
            ..self.clone()
        }
    }
}

/// Dense `m × n` matrix of feature distances, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    m: usize,
    n: usize,
    tau: f64,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(m: usize, n: usize, data: Vec<f64>, tau: f64) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::DimensionMismatch(format!("{m}x{n} cost matrix with {} entries", data.len())));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!("cost entries must be finite and >= 0, got {bad}")));
        }
        Ok(Self { m, n, tau, data })
    }

    pub fn from_fn(m: usize, n: usize, tau: f64, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..m * n).map(|x| f(x / n, x % n)).collect();
        Self::new(m, n, data, tau)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `L1(HKS) + L1(WKS)` when the segment labels agree (or either is absent),
/// `tau` otherwise.
#[allow(clippy::too_many_arguments)]
pub fn feature_distance(
    fm_hks: &[f64],
    fm_wks: &[f64],
    seg_m: Option<usize>,
    fn_hks: &[f64],
    fn_wks: &[f64],
    seg_n: Option<usize>,
    tau: f64,
) -> Result<f64> {
    if fm_hks.len() != fn_hks.len() || fm_wks.len() != fn_wks.len() {
        return Err(Error::DimensionMismatch(format!(
            "descriptor widths {}+{} vs {}+{}",
            fm_hks.len(),
            fm_wks.len(),
            fn_hks.len(),
            fn_wks.len()
        )));
    }
    Ok(match (seg_m, seg_n) {
        (Some(a), Some(b)) if a != b => tau,
        _ => l1(fm_hks, fn_hks) + l1(fm_wks, fn_wks),
    })
}

/// `D[i][j]` = feature distance between curve vertex `i` and mesh vertex `j`.
///
/// Segment gating applies only when both fields carry labels, which must
/// already be expressed in a common labeling. With gating on, `tau` must
/// exceed the largest possible descriptor distance `2d`.
pub fn build_cost_matrix(curve: &FeatureField, mesh: &FeatureField, tau: f64) -> Result<CostMatrix> {
    let (dh, dw) = (curve.hks.d, curve.wks.d);
    if mesh.hks.d != dh || mesh.wks.d != dw {
        return Err(Error::DimensionMismatch(format!(
            "descriptor widths {dh}+{dw} vs {}+{}",
            mesh.hks.d, mesh.wks.d
        )));
    }
    let gated = curve.segments.is_some() && mesh.segments.is_some();
    let max_distance = (dh + dw) as f64;
    if gated && tau <= max_distance {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} does not dominate the largest descriptor distance {max_distance}"
        )));
    }
    let (m, n) = (curve.len(), mesh.len());
    let mut data = vec![0.0; m * n];
    data.par_chunks_mut(n.max(1)).enumerate().try_for_each(|(i, row)| -> Result<()> {
        for (j, out) in row.iter_mut().enumerate() {
            *out = feature_distance(
                curve.hks.row(i),
                curve.wks.row(i),
                curve.segment(i),
                mesh.hks.row(j),
                mesh.wks.row(j),
                mesh.segment(j),
                tau,
            )?;
        }
        Ok(())
    })?;
    CostMatrix::new(m, n, data, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DescriptorKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(rows: &[Vec<f64>], kind: DescriptorKind) -> DescriptorField {
        DescriptorField::new(kind, rows.len(), rows[0].len(), rows.concat()).unwrap()
    }

    fn random_features(n: usize, d: usize, r: usize, seed: u64) -> FeatureField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = || -> Vec<Vec<f64>> { (0..n).map(|_| (0..d).map(|_| rng.gen()).collect()).collect() };
        let (h, w) = (rows(), rows());
        let seg = (0..n).map(|v| (v * 7 + seed as usize) % r).collect();
        FeatureField::new(field(&h, DescriptorKind::Hks), field(&w, DescriptorKind::Wks), Some(seg)).unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = [0.25, 0.4, 0.6];
        assert_eq!(feature_distance(&a, &a, Some(1), &a, &a, Some(1), DEFAULT_TAU).unwrap(), 0.0);
        let b = [0.75, 0.4, 0.6];
        assert_eq!(feature_distance(&a, &a, Some(1), &b, &a, Some(1), DEFAULT_TAU).unwrap(), 0.5);
        assert_eq!(feature_distance(&a, &a, Some(0), &b, &a, Some(2), DEFAULT_TAU).unwrap(), 1000.0);
        assert_eq!(feature_distance(&a, &a, None, &b, &a, Some(2), DEFAULT_TAU).unwrap(), 0.5);
        assert!(feature_distance(&a[..2], &a, None, &b, &a, None, DEFAULT_TAU).is_err());
    }

    #[test]
    fn matrix_matches_elementwise_oracle() {
        let c = random_features(3, 5, 2, 1);
        let m = random_features(4, 5, 2, 2);
        let d = build_cost_matrix(&c, &m, DEFAULT_TAU).unwrap();
        assert_eq!((d.m(), d.n()), (3, 4));
        for i in 0..3 {
            for j in 0..4 {
                let expect = if c.segment(i) != m.segment(j) {
                    DEFAULT_TAU
                } else {
                    (0..5).map(|t| (c.hks.row(i)[t] - m.hks.row(j)[t]).abs()).sum::<f64>()
                        + (0..5).map(|t| (c.wks.row(i)[t] - m.wks.row(j)[t]).abs()).sum::<f64>()
                };
                assert_eq!(d.get(i, j), expect);
            }
        }
    }

    #[test]
    fn sampled_from_own_descriptors_is_zero_on_pairs() {
        let m = random_features(20, 8, 3, 5);
        let picks = [3usize, 11, 0, 19];
        let c = FeatureField::new(
            m.hks.select_rows(&picks),
            m.wks.select_rows(&picks),
            Some(picks.iter().map(|&p| m.segment(p).unwrap()).collect()),
        )
        .unwrap();
        let d = build_cost_matrix(&c, &m, DEFAULT_TAU).unwrap();
        for (i, &p) in picks.iter().enumerate() {
            assert_eq!(d.get(i, p), 0.0);
        }
    }

    #[test]
    fn all_different_segments_is_constant_tau() {
        let mut c = random_features(3, 4, 1, 1);
        let mut m = random_features(5, 4, 1, 2);
        c.segments = Some(vec![0; 3]);
        m.segments = Some(vec![1; 5]);
        let d = build_cost_matrix(&c, &m, DEFAULT_TAU).unwrap();
        assert!(d.data().iter().all(|&x| x == DEFAULT_TAU));
    }

    #[test]
    fn small_tau_rejected_when_gated() {
        let c = random_features(3, 100, 2, 1);
        let m = random_features(3, 100, 2, 2);
        assert!(build_cost_matrix(&c, &m, 200.0).is_err());
        assert!(build_cost_matrix(&c.without_segments(), &m, 200.0).is_ok());
    }

    proptest! {
        #[test]
        fn entries_bounded_and_equivariant(seed in any::<u64>(), m in 1usize..6, n in 1usize..6, d in 1usize..6) {
            let c = random_features(m, d, 3, seed);
            let t = random_features(n, d, 3, seed.wrapping_add(1));
            let cm = build_cost_matrix(&c, &t, DEFAULT_TAU).unwrap();
            for &x in cm.data() {
                prop_assert!(x >= 0.0 && x <= DEFAULT_TAU.max(2.0 * d as f64));
            }
            // Reversing mesh vertices reverses matrix columns.
            let rev: Vec<usize> = (0..n).rev().collect();
            let t_rev = FeatureField::new(
                t.hks.select_rows(&rev),
                t.wks.select_rows(&rev),
                t.segments.as_ref().map(|s| rev.iter().map(|&v| s[v]).collect()),
            ).unwrap();
            let cm_rev = build_cost_matrix(&c, &t_rev, DEFAULT_TAU).unwrap();
            for i in 0..m {
                for j in 0..n {
                    prop_assert_eq!(cm.get(i, j), cm_rev.get(i, n - 1 - j));
                }
            }
        }
    }
}
