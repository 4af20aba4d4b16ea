use std::collections::HashMap;

use spade::handles::FixedVertexHandle;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::{Curve2D, TriMesh};
use crate::{Error, Result};

/// Minimum interior angle enforced by the refinement.
pub const MIN_ANGLE_DEG: f64 = 20.0;

/// Triangulated interior of a query curve.
#[derive(Debug, Clone)]
pub struct PlanarSolidMesh {
    pub vertices: Vec<[f64; 2]>,
    /// CCW triangles.
    pub faces: Vec<[usize; 3]>,
    /// Mesh vertex of each curve point, in curve order.
    pub boundary_map: Vec<usize>,
}

impl PlanarSolidMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn total_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| 0.5 * super::orient2(self.vertices[a], self.vertices[b], self.vertices[c]))
            .sum()
    }

    /// The same triangulation embedded in the z = 0 plane.
    pub fn to_trimesh(&self) -> Result<TriMesh> {
        TriMesh::new(
            self.vertices.iter().map(|p| [p[0], p[1], 0.0]).collect(),
            self.faces.clone(),
        )
    }

    /// Copy with all coordinates scaled by `s`; connectivity is unchanged.
    pub fn scaled(&self, s: f64) -> PlanarSolidMesh {
        PlanarSolidMesh {
            vertices: self.vertices.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
            faces: self.faces.clone(),
            boundary_map: self.boundary_map.clone(),
        }
    }
}

/// Conforming constrained Delaunay triangulation of the curve interior.
///
/// Steiner points are added until every triangle has area at most
/// `max_area` and no angle below [`MIN_ANGLE_DEG`]. Curve segments may be
/// subdivided but are always covered by mesh edges, and every curve point
/// is a mesh vertex.
pub fn tessellate_solid(curve: &Curve2D, max_area: f64) -> Result<PlanarSolidMesh> {
    if !(max_area > 0.0 && max_area.is_finite()) {
        return Err(Error::InvalidArgument(format!("max_area must be positive, got {max_area}")));
    }
    let m = curve.len();
    let points: Vec<Point2<f64>> = curve.points().iter().map(|p| Point2::new(p[0], p[1])).collect();
    let edges: Vec<[usize; 2]> = (0..m).map(|i| [i, (i + 1) % m]).collect();
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::bulk_load_cdt(points, edges)
            .map_err(|e| Error::DegenerateCurve(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != m {
        return Err(Error::DegenerateCurve("curve points are not distinct".into()));
    }

    let budget = (20.0 * curve.area() / max_area).ceil() as usize + 50 * m + 100;
    let result = cdt.refine(
        RefinementParameters::new()
            .with_max_allowed_area(max_area)
            .with_angle_limit(AngleLimit::from_deg(MIN_ANGLE_DEG))
            .with_max_additional_vertices(budget)
            .exclude_outer_faces(true),
    );
    if !result.refinement_complete {
        log::warn!("tessellation stopped at the Steiner point budget ({budget})");
    }
    let excluded: std::collections::HashSet<_> = result.excluded_faces.into_iter().collect();

    let mut index: HashMap<FixedVertexHandle, usize> = HashMap::new();
    let mut vertices = Vec::new();
    // Curve points first, so boundary_map is the identity on them.
    for i in 0..m {
        let h = FixedVertexHandle::from_index(i);
        let p = cdt.vertex(h).position();
        if [p.x, p.y] != curve.points()[i] {
            return Err(Error::DegenerateCurve("triangulator reordered curve points".into()));
        }
        index.insert(h, i);
        vertices.push([p.x, p.y]);
    }
    let mut faces = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let tri = face.vertices().map(|v| {
            let h = v.fix();
            *index.entry(h).or_insert_with(|| {
                let p = v.position();
                vertices.push([p.x, p.y]);
                vertices.len() - 1
            })
        });
        faces.push(tri);
    }
    if faces.is_empty() {
        return Err(Error::DegenerateCurve("no interior triangles".into()));
    }
    Ok(PlanarSolidMesh {
        vertices,
        faces,
        boundary_map: (0..m).collect(),
    })
}
