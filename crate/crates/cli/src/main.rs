//! `elastic`: feature extraction, matching, retrieval, evaluation and
//! benchmarking for 2D-to-3D elastic shape matching.
//!
//! Data goes to stdout, diagnostics to stderr. Exit code 0 means success.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elastic_core::evaluation::GroupMode;
use elastic_core::{RunConfig, Solver};

#[derive(Parser)]
#[command(name = "elastic", version, about = "Globally optimal elastic matching of planar curves onto meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or load from cache) spectral features of a mesh or curve.
    Features(FeaturesArgs),
    /// Match a curve onto a mesh and print the result as JSON.
    Match(MatchArgs),
    /// Rank the meshes of a directory by matching energy.
    Retrieve(RetrieveArgs),
    /// Evaluation: matching error curves and benchmark retrieval tables.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Solver runtime sweep on random instances, as CSV.
    Bench(BenchArgs),
    /// Write synthetic fixtures.
    #[command(subcommand)]
    Synth(SynthCommand),
}

/// Settings shared by every command that computes features or matches.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// Number of Laplace-Beltrami eigenpairs.
    #[arg(long, default_value_t = 25)]
    k: usize,
    /// Descriptor width.
    #[arg(long, default_value_t = 100)]
    d: usize,
    /// Number of regions for segment gating.
    #[arg(long, default_value_t = 6)]
    r: usize,
    /// Penalty for mismatched region labels.
    #[arg(long, default_value_t = 1e3)]
    tau: f64,
    /// Maximum triangle area of the query solid relative to its area.
    #[arg(long, default_value_t = 1e-3)]
    max_area_factor: f64,
    /// Disable segment gating in the cost matrix.
    #[arg(long)]
    no_segments: bool,
    #[arg(long, default_value = "bnb")]
    solver: Solver,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Feature cache directory [default: ~/.cache/elastic].
    #[arg(long, env = "ELASTIC_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the feature cache.
    #[arg(long)]
    no_cache: bool,
}

impl ConfigArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            k: self.k,
            d: self.d,
            r: self.r,
            tau: self.tau,
            max_area_factor: self.max_area_factor,
            segments: !self.no_segments,
            solver: self.solver,
            seed: self.seed,
            threads: self.threads,
            cache_dir: self.cache_root(),
        }
    }

    fn cache_root(&self) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("elastic")))
    }
}

#[derive(Args)]
struct FeaturesArgs {
    /// Mesh (.off, .obj) or curve (.csv, .json).
    input: PathBuf,
    /// Also write the region label of every vertex as a JSON array.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct MatchArgs {
    curve: PathBuf,
    mesh: PathBuf,
    /// Use this cost matrix (binary container) instead of computing features.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Include solver statistics in the output.
    #[arg(long)]
    stats: bool,
    /// Write the JSON here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RetrieveArgs {
    curve: PathBuf,
    /// Directory of target meshes; each file stem is a target id.
    mesh_dir: PathBuf,
    /// `name,class` CSV [default: <MESH_DIR>/labels.csv if present].
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Class of the query [default: looked up by curve file stem in the labels].
    #[arg(long)]
    class: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    First,
    Min,
}

impl From<Group> for GroupMode {
    fn from(g: Group) -> Self {
        match g {
            Group::First => GroupMode::First,
            Group::Min => GroupMode::Min,
        }
    }
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Normalized geodesic error of a match against ground truth.
    Error {
        /// Match result JSON as written by `elastic match`.
        result: PathBuf,
        /// Target mesh of the match.
        mesh: PathBuf,
        /// JSON array with the ground-truth mesh vertex of each curve vertex.
        #[arg(long)]
        ground_truth: PathBuf,
        /// Vertex scored when a curve vertex matches several mesh vertices.
        #[arg(long, value_enum, default_value = "first")]
        group: Group,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Energy, ShapeDNA and segment-cost retrieval on a fixture directory.
    Retrieval {
        fixture: PathBuf,
        /// Feature settings; defaults to the ones recorded in the manifest.
        #[arg(long)]
        override_config: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Curve lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [25, 50, 100, 200, 400])]
    m: Vec<usize>,
    /// Approximate mesh sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [500])]
    n: Vec<usize>,
    /// Solvers to run.
    #[arg(long, value_delimiter = ',', default_values_t = [Solver::Exhaustive, Solver::Bnb])]
    solver: Vec<Solver>,
    /// Cost matrices: uniform random, or zero on a planted walk.
    #[arg(long, value_enum, default_value = "random")]
    costs: BenchCosts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchCosts {
    Random,
    Planted,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Three-class pillow benchmark with cut-and-project queries.
    Benchmark {
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        lon: usize,
        #[arg(long, default_value_t = 10)]
        lat: usize,
        #[arg(long, default_value_t = 0.25)]
        thickness: f64,
        #[arg(long, default_value_t = 0.5)]
        deformation: f64,
        #[arg(long, default_value_t = 4)]
        per_class: usize,
        /// Minimum energy MAP recorded in the manifest.
        #[arg(long, default_value_t = 0.75)]
        map_threshold: f64,
        /// Skip the retrieval run that records reference MAP values.
        #[arg(long)]
        no_reference: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Random mesh and curve with a cost matrix that is zero on a planted walk.
    Planted {
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 80)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn init_threads(threads: usize) -> anyhow::Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Features(a) => {
            init_threads(a.config.threads)?;
            commands::features(&a.input, a.labels_out.as_deref(), &a.config.config())
        }
        Command::Match(a) => {
            init_threads(a.config.threads)?;
            commands::match_cmd(&a.curve, &a.mesh, a.costs.as_deref(), a.stats, a.out.as_deref(), &a.config.config())
        }
        Command::Retrieve(a) => {
            init_threads(a.config.threads)?;
            let json = matches!(a.format, Format::Json);
            commands::retrieve(&a.curve, &a.mesh_dir, a.labels.as_deref(), a.class, json, &a.config.config())
        }
        Command::Eval(EvalCommand::Error {
            result,
            mesh,
            ground_truth,
            group,
            format,
        }) => commands::eval_error(&result, &mesh, &ground_truth, group.into(), matches!(format, Format::Json)),
        Command::Eval(EvalCommand::Retrieval {
            fixture,
            override_config,
            config,
        }) => {
            init_threads(config.threads)?;
            commands::eval_retrieval(&fixture, override_config, &config.config())
        }
        Command::Bench(a) => {
            init_threads(a.threads)?;
            commands::bench(&a.m, &a.n, &a.solver, matches!(a.costs, BenchCosts::Planted), a.seed)
        }
        Command::Synth(SynthCommand::Benchmark {
            out,
            lon,
            lat,
            thickness,
            deformation,
            per_class,
            map_threshold,
            no_reference,
            config,
        }) => {
            init_threads(config.threads)?;
            let params = elastic_core::synthetic::PillowParams {
                lon,
                lat,
                thickness,
                deformation,
            };
            commands::synth_benchmark(&out, &params, per_class, map_threshold, !no_reference, &config.config())
        }
        Command::Synth(SynthCommand::Planted { out, m, n, seed }) => commands::synth_planted(&out, m, n, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
