use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("curve is self-intersecting: segments {0} and {1} cross")]
    SelfIntersecting(usize, usize),

    #[error("mesh is not edge-manifold: edge ({0}, {1}) has {2} incident faces")]
    NonManifold(usize, usize, usize),

    #[error("mesh is disconnected: {0} components")]
    Disconnected(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("degenerate segmentation: {0}")]
    DegenerateSegmentation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("({0}, {1}) -> ({2}, {3}) is not a product graph edge")]
    NotAnEdge(usize, usize, usize, usize),

    #[error("missing ground truth for curve vertex {0}")]
    MissingGroundTruth(usize),

    #[error("ranking has no positive targets")]
    NoPositives,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
