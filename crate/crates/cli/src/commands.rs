use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use elastic_core::container::{cost_from_bytes, cost_to_bytes, read_file, write_file};
use elastic_core::evaluation::{
    average_precision, cumulative_csv, evaluate_retrieval, matching_error, retrieval_rank, BenchmarkReport,
    GroupMode, Query, Target,
};
use elastic_core::geometry::io::{load_curve, load_mesh, save_curve, save_mesh};
use elastic_core::geometry::{geodesic_diameter_auto, GeodesicCache};
use elastic_core::matcher::solve;
use elastic_core::pipeline::{match_features, normalize_curve, normalize_mesh};
use elastic_core::synthetic::{self, load_fixture, write_fixture, PillowParams, ReferenceResults, SyntheticBenchmark};
use elastic_core::{Curve2D, Error, MatchResult, RunConfig, Solver, TriMesh};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{curve_key, mesh_key, FeatureCache, ShapeKind, Status};

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default()
}

fn stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .with_context(|| format!("{} has no usable file name", path.display()))
}

fn shape_kind(path: &Path) -> Result<ShapeKind> {
    match extension(path).as_str() {
        "off" | "obj" => Ok(ShapeKind::Mesh),
        "csv" | "json" => Ok(ShapeKind::Curve),
        other => bail!("{}: unsupported extension {other:?}", path.display()),
    }
}

fn load_curve_at(path: &Path) -> Result<Curve2D> {
    load_curve(path, None).with_context(|| format!("loading curve {}", path.display()))
}

fn load_mesh_at(path: &Path) -> Result<TriMesh> {
    load_mesh(path, None).with_context(|| format!("loading mesh {}", path.display()))
}

fn report_status(what: &Path, status: Status, cache: &FeatureCache, key: &str) {
    let entry = cache.entry_dir(key).map(|d| d.display().to_string()).unwrap_or_default();
    match status {
        Status::Hit => log::info!("{}: cache hit ({entry})", what.display()),
        Status::Miss | Status::Repaired => log::info!("{}: features computed ({entry})", what.display()),
        Status::Disabled => log::info!("{}: features computed (cache disabled)", what.display()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct FeaturesSummary {
    kind: ShapeKind,
    key: String,
    entry: Option<PathBuf>,
    vertices: usize,
    scale: f64,
    k: usize,
    d: usize,
    r: usize,
}

pub fn features(input: &Path, labels_out: Option<&Path>, config: &RunConfig) -> Result<()> {
    config.validate()?;
    let cache = FeatureCache::new(config.cache_dir.clone());
    let kind = shape_kind(input)?;
    let (key, vertices, scale, labels, status) = match kind {
        ShapeKind::Mesh => {
            let mesh = load_mesh_at(input)?;
            let (f, status) = cache.mesh_features(&mesh, config)?;
            (mesh_key(&mesh, config), f.mesh.n_vertices(), f.scale, f.labels, status)
        }
        ShapeKind::Curve => {
            let curve = load_curve_at(input)?;
            let (f, status) = cache.curve_features(&curve, config)?;
            (curve_key(&curve, config), f.solid.n_vertices(), f.scale, f.labels, status)
        }
    };
    report_status(input, status, &cache, &key);
    if let Some(path) = labels_out {
        fs::write(path, serde_json::to_string(&labels)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = FeaturesSummary {
        kind,
        entry: cache.entry_dir(&key),
        key,
        vertices,
        scale,
        k: config.k,
        d: config.d,
        r: config.r,
    };
    emit(None, &to_json(&summary)?)
}

pub fn match_cmd(
    curve_path: &Path,
    mesh_path: &Path,
    costs: Option<&Path>,
    stats: bool,
    out: Option<&Path>,
    config: &RunConfig,
) -> Result<()> {
    config.validate()?;
    let curve = load_curve_at(curve_path)?;
    let mesh = load_mesh_at(mesh_path)?;
    let result = match costs {
        Some(path) => {
            let d = cost_from_bytes(&read_file(path)?).with_context(|| format!("reading {}", path.display()))?;
            let (curve, _, _) = normalize_curve(&curve, config)?;
            let (mesh, _) = normalize_mesh(&mesh)?;
            solve(config.solver, &d, &curve, &mesh, &GeodesicCache::new(&mesh))?
        }
        None => {
            let cache = FeatureCache::new(config.cache_dir.clone());
            let (query, status) = cache.curve_features(&curve, config)?;
            report_status(curve_path, status, &cache, &curve_key(&curve, config));
            let (target, status) = cache.mesh_features(&mesh, config)?;
            report_status(mesh_path, status, &cache, &mesh_key(&mesh, config));
            match_features(&query, &target, config)?.result
        }
    };
    log::info!(
        "energy {} after {} path solves in {:.3}s",
        result.energy(),
        result.stats.paths_solved,
        result.stats.wall_time_s
    );
    emit(out, &(result.to_json(stats) + "\n"))
}

/// `name,class` rows; a header line starting with `name` is skipped.
fn read_labels(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut labels = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (no == 0 && line.starts_with("name")) {
            continue;
        }
        let Some((name, class)) = line.split_once(',') else {
            bail!("{}:{}: expected name,class", path.display(), no + 1);
        };
        labels.insert(name.trim().to_string(), class.trim().to_string());
    }
    Ok(labels)
}

fn mesh_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && matches!(extension(p).as_str(), "off" | "obj"));
    files.sort();
    if files.is_empty() {
        bail!("no .off or .obj meshes in {}", dir.display());
    }
    Ok(files)
}

#[derive(Serialize)]
struct RetrievalOutput<'a> {
    query: &'a str,
    class: Option<&'a str>,
    ranking: &'a [elastic_core::evaluation::RankEntry],
    ap: Option<f64>,
}

pub fn retrieve(
    curve_path: &Path,
    mesh_dir: &Path,
    labels: Option<&Path>,
    class: Option<String>,
    json: bool,
    config: &RunConfig,
) -> Result<()> {
    config.validate()?;
    let cache = FeatureCache::new(config.cache_dir.clone());
    let query_id = stem(curve_path)?;
    let curve = load_curve_at(curve_path)?;
    let (query, status) = cache.curve_features(&curve, config)?;
    report_status(curve_path, status, &cache, &curve_key(&curve, config));

    let default_labels = mesh_dir.join(synthetic::LABELS_FILE);
    let labels = match labels {
        Some(p) => Some(read_labels(p)?),
        None if default_labels.is_file() => Some(read_labels(&default_labels)?),
        None => None,
    };
    let files = mesh_files(mesh_dir)?;
    let ids = files.iter().map(|p| stem(p)).collect::<Result<Vec<_>>>()?;
    let features = files
        .par_iter()
        .map(|p| {
            let mesh = load_mesh_at(p)?;
            let (f, status) = cache.mesh_features(&mesh, config)?;
            report_status(p, status, &cache, &mesh_key(&mesh, config));
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<Target> = ids
        .iter()
        .zip(&features)
        .map(|(id, f)| Target {
            id,
            class: labels.as_ref().and_then(|l| l.get(id)).map(String::as_str),
            features: f,
        })
        .collect();
    let ranking = retrieval_rank(&query_id, &query, &targets, config)?;

    let class = class.or_else(|| labels.as_ref().and_then(|l| l.get(&query_id).cloned()));
    let ap = match (&labels, &class) {
        (Some(_), Some(c)) => match average_precision(&ranking, c) {
            Ok(ap) => Some(ap),
            Err(Error::NoPositives) => {
                log::warn!("no target of class {c:?}; AP is undefined");
                None
            }
            Err(e) => return Err(e.into()),
        },
        _ => None,
    };
    if let Some(ap) = ap {
        log::info!("AP {ap}");
    }
    if json {
        let out = RetrievalOutput {
            query: &query_id,
            class: class.as_deref(),
            ranking: &ranking.entries,
            ap,
        };
        emit(None, &to_json(&out)?)
    } else {
        emit(None, &ranking.to_csv())
    }
}

pub fn eval_error(result: &Path, mesh: &Path, ground_truth: &Path, mode: GroupMode, json: bool) -> Result<()> {
    let text = fs::read_to_string(result).with_context(|| format!("reading {}", result.display()))?;
    let result = MatchResult::from_json(&text)?;
    let mesh = load_mesh_at(mesh)?;
    let gt_text = fs::read_to_string(ground_truth).with_context(|| format!("reading {}", ground_truth.display()))?;
    let gt: Vec<usize> = serde_json::from_str(&gt_text).with_context(|| format!("parsing {}", ground_truth.display()))?;
    let profile = matching_error(
        &result,
        &gt,
        &GeodesicCache::new(&mesh),
        geodesic_diameter_auto(&mesh),
        mode,
    )?;
    if json {
        emit(None, &to_json(&profile)?)
    } else {
        emit(None, &cumulative_csv(&profile.thresholds, &profile.fractions))
    }
}

/// Features for every shape of a benchmark (through the cache) and the
/// retrieval report.
fn benchmark_report(bench: &SyntheticBenchmark, config: &RunConfig) -> Result<BenchmarkReport> {
    let cache = FeatureCache::new(config.cache_dir.clone());
    let mesh_features = bench
        .targets
        .par_iter()
        .map(|t| Ok(cache.mesh_features(&t.mesh, config)?.0))
        .collect::<Result<Vec<_>>>()?;
    let curve_features = bench
        .queries
        .par_iter()
        .map(|q| Ok(cache.curve_features(&q.curve, config)?.0))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<Target> = bench
        .targets
        .iter()
        .zip(&mesh_features)
        .map(|(t, f)| Target {
            id: &t.name,
            class: Some(t.class.name()),
            features: f,
        })
        .collect();
    let queries: Vec<Query> = bench
        .queries
        .iter()
        .zip(&curve_features)
        .map(|(q, f)| Query {
            id: &q.name,
            class: q.class.name(),
            features: f,
        })
        .collect();
    Ok(evaluate_retrieval(&queries, &targets, config)?)
}

pub fn eval_retrieval(fixture: &Path, override_config: bool, cli_config: &RunConfig) -> Result<()> {
    let (manifest, bench) = load_fixture(fixture)?;
    let config = if override_config {
        cli_config.clone()
    } else {
        RunConfig {
            cache_dir: cli_config.cache_dir.clone(),
            threads: cli_config.threads,
            ..manifest.config.clone()
        }
    };
    config.validate()?;
    let report = benchmark_report(&bench, &config)?;
    log::info!(
        "MAP energy {:.4}, ShapeDNA {:.4}, segment cost {:.4} (threshold {})",
        report.energy.map,
        report.shapedna.map,
        report.segment.map,
        manifest.map_threshold
    );
    emit(None, &to_json(&report)?)
}

pub fn bench(ms: &[usize], ns: &[usize], solvers: &[Solver], planted: bool, seed: u64) -> Result<()> {
    let mut out = String::from("m,n,solver,wall_time_s,heap_pops,paths_solved,energy\n");
    for &n in ns {
        for &m in ms {
            let inst = synthetic::random_instance(m, n, seed);
            let n_actual = inst.mesh.n_vertices();
            let costs = if planted {
                synthetic::planted_costs(&synthetic::planted_walk(&inst.mesh, m, seed), n_actual)
            } else {
                inst.costs
            };
            let geo = GeodesicCache::new(&inst.mesh);
            for &solver in solvers {
                let r = solve(solver, &costs, &inst.curve, &inst.mesh, &geo)?;
                log::info!("m={m} n={n_actual} {solver}: {:.3}s", r.stats.wall_time_s);
                out.push_str(&format!(
                    "{m},{n_actual},{solver},{:?},{},{},{:?}\n",
                    r.stats.wall_time_s,
                    r.stats.heap_pops,
                    r.stats.paths_solved,
                    r.energy()
                ));
            }
        }
    }
    emit(None, &out)
}

pub fn synth_benchmark(
    out: &Path,
    params: &PillowParams,
    per_class: usize,
    map_threshold: f64,
    reference: bool,
    config: &RunConfig,
) -> Result<()> {
    if !params.lat.is_multiple_of(2) || params.lat < 4 || params.lon < 3 {
        bail!("lat must be an even number of at least 4 and lon at least 3");
    }
    config.validate()?;
    let bench = synthetic::synthetic_benchmark(params, per_class, config.seed);
    let recorded = RunConfig {
        cache_dir: None,
        threads: 0,
        ..config.clone()
    };
    let mut manifest = write_fixture(&bench, per_class, config.seed, &recorded, map_threshold, out)?;
    if reference {
        let report = benchmark_report(&bench, config)?;
        manifest.reference = Some(ReferenceResults {
            energy_map: report.energy.map,
            shapedna_map: report.shapedna.map,
            segment_map: report.segment.map,
            region_solve_fraction: report.region_solve_fraction.unwrap_or(f64::NAN),
        });
        manifest.save(out)?;
        log::info!(
            "MAP energy {:.4}, ShapeDNA {:.4}, segment cost {:.4}",
            report.energy.map,
            report.shapedna.map,
            report.segment.map
        );
    }
    log::info!("wrote {} targets and {} queries to {}", bench.targets.len(), bench.queries.len(), out.display());
    Ok(())
}

pub fn synth_planted(out: &Path, m: usize, n: usize, seed: u64) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mesh = synthetic::random_closed_mesh(n, seed);
    let walk = synthetic::planted_walk(&mesh, m, seed);
    let costs = synthetic::planted_costs(&walk, mesh.n_vertices());
    save_mesh(&mesh, out.join("mesh.off"), None)?;
    save_curve(&synthetic::random_star_curve(m, seed), out.join("curve.csv"), None)?;
    write_file(out.join("costs.bin"), &cost_to_bytes(&costs))?;
    fs::write(out.join("walk.json"), serde_json::to_string(&walk)? + "\n")?;
    log::info!("wrote planted instance with m={m}, n={} to {}", mesh.n_vertices(), out.display());
    Ok(())
}
