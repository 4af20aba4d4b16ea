//! Globally optimal elastic matching of a closed planar curve onto a triangle
//! mesh.
//!
//! The matching is a shortest closed path in the product graph of the curve
//! and the mesh. Its edge costs integrate a feature distance between spectral
//! descriptors of the 2D query (computed on its tessellated interior and
//! restricted to the boundary) and of the 3D target. Around the solver sit the
//! feature pipeline (Laplace–Beltrami eigenpairs, HKS/WKS, region labels) and a
//! retrieval/evaluation harness.
//!
//! Module map:
//!
//! - [`geometry`]: curve and mesh types, OFF/OBJ/CSV/JSON I/O, graph geodesics,
//!   constrained Delaunay tessellation of the query interior.
//! - [`spectral`]: cotangent Laplacians, generalized eigendecomposition, HKS and
//!   WKS descriptor fields.
//! - [`segmentation`]: spectral region labels and the region assignment.
//! - [`cost`]: feature distance and the dense cost matrix.
//! - [`matcher`]: product graph, layered Dijkstra, exhaustive and
//!   branch-and-bound solvers.
//! - [`evaluation`]: geodesic matching error, AP/MAP, ShapeDNA and
//!   segment-cost baselines.
//! - [`pipeline`]: end-to-end feature extraction and matching.
//! - [`synthetic`]: procedural meshes and the synthetic retrieval benchmark.

mod error;
mod heap;

pub mod config;
pub mod container;
pub mod cost;
pub mod evaluation;
pub mod geometry;
pub mod matcher;
pub mod pipeline;
pub mod segmentation;
pub mod spectral;
pub mod synthetic;

pub use config::{RunConfig, Solver};
pub use cost::{CostMatrix, FeatureField};
pub use matcher::{MatchPath, MatchResult, ProductVertex};
pub use spectral::{DescriptorField, DescriptorKind, LaplacianPair, SpectralBasis};
pub use error::{Error, Result};
pub use geometry::{Curve2D, GeodesicField, PlanarSolidMesh, TriMesh};


