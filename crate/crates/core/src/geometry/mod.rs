//! Shape ingestion and planar/mesh geometry.

mod curve;
mod geodesic;
pub mod io;
mod mesh;
mod tessellate;

pub use curve::Curve2D;
pub use geodesic::{
    geodesic_diameter, geodesic_diameter_auto, geodesic_distances, GeodesicCache, GeodesicField,
    GeodesicProvider, EXACT_DIAMETER_MAX_VERTICES,
};
pub use mesh::TriMesh;
pub use tessellate::{tessellate_solid, PlanarSolidMesh, MIN_ANGLE_DEG};

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(sub3(a, b))
}

pub(crate) fn triangle_area3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    0.5 * norm3(cross3(sub3(b, a), sub3(c, a)))
}

/// Twice the signed area of the triangle (a, b, c); positive when CCW.
pub(crate) fn orient2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}
