//! End-to-end feature extraction and matching.
//!
//! Both shapes are scaled to unit geodesic diameter (the curve through the
//! edge graph of its tessellated solid) before any spectral work, so the 2D
//! and 3D coordinates entering the edge cost live on the same length scale.

use crate::config::RunConfig;
use crate::cost::{build_cost_matrix, CostMatrix, FeatureField};
use crate::geometry::{geodesic_diameter_auto, tessellate_solid, GeodesicCache};
use crate::matcher::{solve, MatchResult};
use crate::segmentation::{
    assign_regions, face_adjacency, mesh_adjacency, region_signatures, segment_shape, RegionAssignment,
    SegmentLabels,
};
use crate::spectral::{
    build_laplacian_2d, build_laplacian_3d, compute_hks, compute_wks, eigendecompose, restrict_to_boundary,
    DescriptorField, SpectralBasis,
};
use crate::{Curve2D, Error, PlanarSolidMesh, Result, TriMesh};

/// Spectral features of a target mesh.
#[derive(Debug, Clone)]
pub struct MeshFeatures {
    /// Input mesh scaled to unit geodesic diameter.
    pub mesh: TriMesh,
    /// Factor applied to the input coordinates.
    pub scale: f64,
    pub basis: SpectralBasis,
    pub hks: DescriptorField,
    pub wks: DescriptorField,
    pub labels: SegmentLabels,
}

/// Spectral features of a query curve, computed on its solid.
#[derive(Debug, Clone)]
pub struct CurveFeatures {
    /// Input curve scaled to unit solid diameter.
    pub curve: Curve2D,
    pub scale: f64,
    /// Tessellated interior, scaled like `curve`.
    pub solid: PlanarSolidMesh,
    pub basis: SpectralBasis,
    /// Fields on all solid vertices.
    pub hks: DescriptorField,
    pub wks: DescriptorField,
    pub labels: SegmentLabels,
}

fn unit_scale(diameter: f64) -> Result<f64> {
    if !(diameter.is_finite() && diameter > 0.0) {
        return Err(Error::InvalidArgument(format!("shape has geodesic diameter {diameter}")));
    }
    Ok(1.0 / diameter)
}

impl MeshFeatures {
    /// Reassembles features from cached parts.
    pub fn from_parts(
        mesh: TriMesh,
        scale: f64,
        basis: SpectralBasis,
        hks: DescriptorField,
        wks: DescriptorField,
        labels: SegmentLabels,
    ) -> Result<Self> {
        let n = mesh.n_vertices();
        if basis.n() != n || hks.n != n || wks.n != n || labels.len() != n {
            return Err(Error::DimensionMismatch(format!("features do not fit a mesh with {n} vertices")));
        }
        Ok(Self {
            mesh,
            scale,
            basis,
            hks,
            wks,
            labels,
        })
    }

    pub fn signatures(&self) -> Result<Vec<Vec<f64>>> {
        region_signatures(&self.labels, &self.hks, &self.wks, &self.basis.mass)
    }
}

impl CurveFeatures {
    /// Reassembles features from cached parts.
    pub fn from_parts(
        curve: Curve2D,
        scale: f64,
        solid: PlanarSolidMesh,
        basis: SpectralBasis,
        hks: DescriptorField,
        wks: DescriptorField,
        labels: SegmentLabels,
    ) -> Result<Self> {
        let n = solid.n_vertices();
        if basis.n() != n || hks.n != n || wks.n != n || labels.len() != n || solid.boundary_map.len() != curve.len() {
            return Err(Error::DimensionMismatch(format!("features do not fit a solid with {n} vertices")));
        }
        Ok(Self {
            curve,
            scale,
            solid,
            basis,
            hks,
            wks,
            labels,
        })
    }

    pub fn signatures(&self) -> Result<Vec<Vec<f64>>> {
        region_signatures(&self.labels, &self.hks, &self.wks, &self.basis.mass)
    }

    pub fn boundary_hks(&self) -> Result<DescriptorField> {
        restrict_to_boundary(&self.hks, &self.solid)
    }

    pub fn boundary_wks(&self) -> Result<DescriptorField> {
        restrict_to_boundary(&self.wks, &self.solid)
    }

    /// Solid labels at the curve vertices.
    pub fn boundary_labels(&self) -> Vec<usize> {
        self.labels.select(&self.solid.boundary_map)
    }
}

/// `mesh` scaled to unit geodesic diameter, with the factor used.
pub fn normalize_mesh(mesh: &TriMesh) -> Result<(TriMesh, f64)> {
    let scale = unit_scale(geodesic_diameter_auto(mesh))?;
    Ok((mesh.scaled(scale), scale))
}

/// Tessellated solid of `curve`, with both scaled to unit solid diameter.
pub fn normalize_curve(curve: &Curve2D, config: &RunConfig) -> Result<(Curve2D, PlanarSolidMesh, f64)> {
    let solid = tessellate_query(curve, config)?;
    let scale = unit_scale(geodesic_diameter_auto(&solid.to_trimesh()?))?;
    Ok((curve.scaled(scale), solid.scaled(scale), scale))
}

/// Scale `mesh` to unit diameter, then eigenpairs, HKS, WKS and regions.
pub fn extract_mesh_features(mesh: &TriMesh, config: &RunConfig) -> Result<MeshFeatures> {
    config.validate()?;
    let (mesh, scale) = normalize_mesh(mesh)?;
    let basis = eigendecompose(&build_laplacian_3d(&mesh)?, config.k)?;
    let hks = compute_hks(&basis, config.d)?;
    let wks = compute_wks(&basis, config.d)?;
    let labels = segment_shape(&basis, &mesh_adjacency(&mesh), config.r)?;
    Ok(MeshFeatures {
        mesh,
        scale,
        basis,
        hks,
        wks,
        labels,
    })
}

/// Tessellate the interior of `curve` with triangles of area at most
/// `max_area_factor` times the enclosed area. Nothing is rescaled.
pub fn tessellate_query(curve: &Curve2D, config: &RunConfig) -> Result<PlanarSolidMesh> {
    tessellate_solid(curve, curve.area() * config.max_area_factor)
}

/// Tessellate, scale to unit solid diameter, then eigenpairs, HKS, WKS and
/// regions on the solid.
pub fn extract_curve_features(curve: &Curve2D, config: &RunConfig) -> Result<CurveFeatures> {
    config.validate()?;
    let (curve, solid, scale) = normalize_curve(curve, config)?;
    let basis = eigendecompose(&build_laplacian_2d(&solid)?, config.k)?;
    let hks = compute_hks(&basis, config.d)?;
    let wks = compute_wks(&basis, config.d)?;
    let labels = segment_shape(&basis, &face_adjacency(solid.n_vertices(), &solid.faces), config.r)?;
    Ok(CurveFeatures {
        curve,
        scale,
        solid,
        basis,
        hks,
        wks,
        labels,
    })
}

/// Everything produced by [`match_features`].
#[derive(Debug, Clone)]
pub struct PairMatch {
    pub result: MatchResult,
    pub costs: CostMatrix,
    /// Region correspondence used for gating; `None` without segments.
    pub assignment: Option<RegionAssignment>,
}

/// Per-vertex feature fields of both shapes. With `segments`, curve regions
/// are relabeled through the region assignment so matched regions share a
/// label.
pub fn feature_fields(
    query: &CurveFeatures,
    target: &MeshFeatures,
    segments: bool,
) -> Result<(FeatureField, FeatureField, Option<RegionAssignment>)> {
    let (curve_seg, mesh_seg, assignment) = if segments {
        let assignment = assign_regions(&query.signatures()?, &target.signatures()?)?;
        let curve_seg = query.boundary_labels().iter().map(|&l| assignment.perm[l]).collect();
        (Some(curve_seg), Some(target.labels.labels().to_vec()), Some(assignment))
    } else {
        (None, None, None)
    };
    let curve_field = FeatureField::new(query.boundary_hks()?, query.boundary_wks()?, curve_seg)?;
    let mesh_field = FeatureField::new(target.hks.clone(), target.wks.clone(), mesh_seg)?;
    Ok((curve_field, mesh_field, assignment))
}

/// Cost matrix of the pair and its optimal closed matching.
pub fn match_features(query: &CurveFeatures, target: &MeshFeatures, config: &RunConfig) -> Result<PairMatch> {
    let (curve_field, mesh_field, assignment) = feature_fields(query, target, config.segments)?;
    let costs = build_cost_matrix(&curve_field, &mesh_field, config.tau)?;
    let geodesics = GeodesicCache::new(&target.mesh);
    let result = solve(config.solver, &costs, &query.curve, &target.mesh, &geodesics)?;
    Ok(PairMatch {
        result,
        costs,
        assignment,
    })
}

/// Feature extraction for both shapes followed by [`match_features`].
pub fn match_shapes(curve: &Curve2D, mesh: &TriMesh, config: &RunConfig) -> Result<PairMatch> {
    let query = extract_curve_features(curve, config)?;
    let target = extract_mesh_features(mesh, config)?;
    match_features(&query, &target, config)
}
