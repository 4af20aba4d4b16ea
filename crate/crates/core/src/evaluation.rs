//! Geodesic matching error, cumulative error curves, average precision and
//! the two retrieval baselines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::geometry::GeodesicProvider;
use crate::matcher::MatchResult;
use crate::pipeline::{match_features, CurveFeatures, MeshFeatures};
use crate::segmentation::assign_regions;
use crate::spectral::SpectralBasis;
use crate::{Error, Result};

/// Which mesh vertex of a multi-vertex correspondence is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupMode {
    /// The first matched vertex in path order.
    #[default]
    First,
    /// The matched vertex closest to the ground truth.
    Min,
}

/// Per-point normalized geodesic errors and their cumulative curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub errors: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub fractions: Vec<f64>,
}

/// `count + 1` evenly spaced thresholds from 0 to 1.
pub fn default_thresholds(count: usize) -> Vec<f64> {
    let count = count.max(1);
    (0..=count).map(|t| t as f64 / count as f64).collect()
}

/// Geodesic distance from each curve vertex's match to its ground-truth
/// vertex, divided by the mesh diameter and clipped to 1.
pub fn matching_error(
    result: &MatchResult,
    ground_truth: &[usize],
    geodesics: &dyn GeodesicProvider,
    diameter: f64,
    mode: GroupMode,
) -> Result<ErrorProfile> {
    let m = result.correspondences.len();
    if ground_truth.len() < m {
        return Err(Error::MissingGroundTruth(ground_truth.len()));
    }
    if diameter.is_nan() || diameter <= 0.0 {
        return Err(Error::InvalidArgument(format!("diameter must be positive, got {diameter}")));
    }
    let mut errors = Vec::with_capacity(m);
    for (group, &gt) in result.correspondences.iter().zip(ground_truth) {
        let dist = geodesics.distances(gt);
        if gt >= dist.len() {
            return Err(Error::InvalidArgument(format!("ground-truth vertex {gt} out of range")));
        }
        let d = match mode {
            GroupMode::First => dist[group[0]],
            GroupMode::Min => group.iter().map(|&j| dist[j]).fold(f64::INFINITY, f64::min),
        };
        errors.push((d / diameter).clamp(0.0, 1.0));
    }
    let thresholds = default_thresholds(100);
    let fractions = cumulative_curve(&errors, &thresholds);
    Ok(ErrorProfile {
        errors,
        thresholds,
        fractions,
    })
}

/// Fraction of errors at or below each threshold.
pub fn cumulative_curve(errors: &[f64], thresholds: &[f64]) -> Vec<f64> {
    let total = errors.len().max(1) as f64;
    thresholds
        .iter()
        .map(|&t| errors.iter().filter(|&&e| e <= t).count() as f64 / total)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub target: String,
    pub class: Option<String>,
    pub score: f64,
}

/// Targets ordered by ascending score, ties by target id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRanking {
    pub query: String,
    pub entries: Vec<RankEntry>,
}

impl RetrievalRanking {
    pub fn new(query: impl Into<String>, mut entries: Vec<RankEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.target.cmp(&b.target)));
        if entries.windows(2).any(|w| w[0].target == w[1].target) {
            return Err(Error::InvalidArgument("duplicate target ids in ranking".into()));
        }
        Ok(Self {
            query: query.into(),
            entries,
        })
    }

    /// Rows `rank,target,score,class` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,target,score,class\n");
        for (r, e) in self.entries.iter().enumerate() {
            writeln!(out, "{},{},{:?},{}", r + 1, e.target, e.score, e.class.as_deref().unwrap_or("")).unwrap();
        }
        out
    }
}

/// Mean over positive ranks of the precision at that rank.
pub fn average_precision(ranking: &RetrievalRanking, positive_class: &str) -> Result<f64> {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (r, e) in ranking.entries.iter().enumerate() {
        if e.class.as_deref() == Some(positive_class) {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    if hits == 0 {
        return Err(Error::NoPositives);
    }
    Ok(sum / hits as f64)
}

pub fn mean_average_precision(aps: &[f64]) -> f64 {
    aps.iter().sum::<f64>() / aps.len().max(1) as f64
}

/// Per-query AP with the mean over queries and over each class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalSummary {
    pub per_query: BTreeMap<String, f64>,
    pub per_class: BTreeMap<String, f64>,
    pub map: f64,
}

/// Scores each ranking against its query class.
pub fn summarize(rankings: &[(RetrievalRanking, String)]) -> Result<RetrievalSummary> {
    let mut per_query = BTreeMap::new();
    let mut by_class: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut aps = Vec::with_capacity(rankings.len());
    for (ranking, class) in rankings {
        let ap = average_precision(ranking, class)?;
        per_query.insert(ranking.query.clone(), ap);
        by_class.entry(class.clone()).or_default().push(ap);
        aps.push(ap);
    }
    Ok(RetrievalSummary {
        per_query,
        per_class: by_class.into_iter().map(|(c, v)| (c, mean_average_precision(&v))).collect(),
        map: mean_average_precision(&aps),
    })
}

/// Euclidean distance between the first `k` nonzero eigenvalues.
pub fn shapedna_distance(a: &SpectralBasis, b: &SpectralBasis, k: usize) -> Result<f64> {
    if a.k() <= k || b.k() <= k {
        return Err(Error::InvalidArgument(format!(
            "ShapeDNA with {k} eigenvalues needs bases with more than {k} eigenpairs (got {} and {})",
            a.k(),
            b.k()
        )));
    }
    Ok((1..=k)
        .map(|j| (a.eigenvalues[j] - b.eigenvalues[j]).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Optimal region-assignment cost used directly as a retrieval score.
pub fn segment_cost_baseline(sig2d: &[Vec<f64>], sig3d: &[Vec<f64>]) -> Result<f64> {
    Ok(assign_regions(sig2d, sig3d)?.cost)
}

/// A retrieval candidate with precomputed features.
#[derive(Debug, Clone, Copy)]
pub struct Target<'a> {
    pub id: &'a str,
    pub class: Option<&'a str>,
    pub features: &'a MeshFeatures,
}

fn rank_by<F>(query: &str, targets: &[Target<'_>], score: F) -> Result<RetrievalRanking>
where
    F: Fn(&MeshFeatures) -> Result<f64> + Sync,
{
    let entries = targets
        .par_iter()
        .map(|t| {
            Ok(RankEntry {
                target: t.id.to_string(),
                class: t.class.map(str::to_string),
                score: score(t.features)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RetrievalRanking::new(query, entries)
}

/// Matches the query against every target (in parallel) and ranks the
/// targets by optimal matching energy.
pub fn retrieval_rank(
    query_id: &str,
    query: &CurveFeatures,
    targets: &[Target<'_>],
    config: &RunConfig,
) -> Result<RetrievalRanking> {
    rank_by(query_id, targets, |t| Ok(match_features(query, t, config)?.result.energy()))
}

/// Ranking by [`shapedna_distance`] over `k` nonzero eigenvalues.
pub fn shapedna_rank(query_id: &str, query: &CurveFeatures, targets: &[Target<'_>], k: usize) -> Result<RetrievalRanking> {
    rank_by(query_id, targets, |t| shapedna_distance(&query.basis, &t.basis, k))
}

/// Ranking by [`segment_cost_baseline`].
pub fn segment_rank(query_id: &str, query: &CurveFeatures, targets: &[Target<'_>]) -> Result<RetrievalRanking> {
    let sig2d = query.signatures()?;
    rank_by(query_id, targets, |t| segment_cost_baseline(&sig2d, &t.signatures()?))
}

/// A query with its class and precomputed features.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub id: &'a str,
    pub class: &'a str,
    pub features: &'a CurveFeatures,
}

/// Energy ranking and both baselines over one query set, laid out like a
/// per-class AP table with a MAP row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub energy: RetrievalSummary,
    pub shapedna: RetrievalSummary,
    pub segment: RetrievalSummary,
    pub rankings: Vec<RetrievalRanking>,
    /// Region solves of branch-and-bound over constrained runs of the
    /// exhaustive solver, summed over all pairs. Only set for
    /// [`crate::Solver::Bnb`].
    pub region_solve_fraction: Option<f64>,
}

/// Ranks every target for every query by energy, ShapeDNA distance (over
/// `k - 1` nonzero eigenvalues) and segment cost.
pub fn evaluate_retrieval(queries: &[Query<'_>], targets: &[Target<'_>], config: &RunConfig) -> Result<BenchmarkReport> {
    let mut energy = Vec::new();
    let mut shapedna = Vec::new();
    let mut segment = Vec::new();
    let (mut solved, mut runs) = (0usize, 0usize);
    for q in queries {
        let results = targets
            .par_iter()
            .map(|t| match_features(q.features, t.features, config).map(|pm| pm.result))
            .collect::<Result<Vec<_>>>()?;
        solved += results.iter().map(|r| r.stats.paths_solved).sum::<usize>();
        runs += targets.iter().map(|t| t.features.mesh.n_vertices()).sum::<usize>();
        let entries = targets
            .iter()
            .zip(&results)
            .map(|(t, r)| RankEntry {
                target: t.id.to_string(),
                class: t.class.map(str::to_string),
                score: r.energy(),
            })
            .collect();
        let class = q.class.to_string();
        energy.push((RetrievalRanking::new(q.id, entries)?, class.clone()));
        shapedna.push((shapedna_rank(q.id, q.features, targets, config.k - 1)?, class.clone()));
        segment.push((segment_rank(q.id, q.features, targets)?, class));
    }
    Ok(BenchmarkReport {
        energy: summarize(&energy)?,
        shapedna: summarize(&shapedna)?,
        segment: summarize(&segment)?,
        rankings: energy.into_iter().map(|(r, _)| r).collect(),
        region_solve_fraction: (config.solver == crate::Solver::Bnb).then(|| solved as f64 / runs.max(1) as f64),
    })
}

/// Rows `threshold,fraction` with a header line.
pub fn cumulative_csv(thresholds: &[f64], fractions: &[f64]) -> String {
    let mut out = String::from("threshold,fraction\n");
    for (t, f) in thresholds.iter().zip(fractions) {
        writeln!(out, "{t:?},{f:?}").unwrap();
    }
    out
}
