use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::geometry::{cross3, dot3, norm3, sub3, PlanarSolidMesh, TriMesh};
use crate::{Error, Result};

/// Cotangent stiffness matrix and lumped mass.
///
/// `stiffness` is symmetric positive semidefinite with zero row sums:
/// off-diagonal entries are `-(cot α + cot β) / 2` over the angles opposite
/// each edge. `mass` holds one third of the incident triangle area per vertex.
#[derive(Debug, Clone)]
pub struct LaplacianPair {
    pub stiffness: CsrMatrix<f64>,
    pub mass: Vec<f64>,
}

impl LaplacianPair {
    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

pub fn build_laplacian_3d(mesh: &TriMesh) -> Result<LaplacianPair> {
    cotangent_laplacian(mesh.vertices(), mesh.faces())
}

/// Flat-metric Laplacian of the tessellated query interior. Boundary
/// vertices get no special treatment, which amounts to natural boundary
/// conditions.
pub fn build_laplacian_2d(solid: &PlanarSolidMesh) -> Result<LaplacianPair> {
    let pts: Vec<[f64; 3]> = solid.vertices.iter().map(|p| [p[0], p[1], 0.0]).collect();
    cotangent_laplacian(&pts, &solid.faces)
}

fn cotangent_laplacian(points: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<LaplacianPair> {
    let n = points.len();
    let mut coo = CooMatrix::new(n, n);
    let mut diag = vec![0.0; n];
    let mut mass = vec![0.0; n];
    for (fi, f) in faces.iter().enumerate() {
        let p = f.map(|v| points[v]);
        let area = 0.5 * norm3(cross3(sub3(p[1], p[0]), sub3(p[2], p[0])));
        for k in 0..3 {
            // Angle at corner k is opposite edge (k+1, k+2).
            let (i, j) = (f[(k + 1) % 3], f[(k + 2) % 3]);
            let u = sub3(p[(k + 1) % 3], p[k]);
            let v = sub3(p[(k + 2) % 3], p[k]);
            let cot = dot3(u, v) / norm3(cross3(u, v));
            if !cot.is_finite() {
                return Err(Error::NumericalDegeneracy(format!(
                    "non-finite cotangent in face {fi}"
                )));
            }
            let w = 0.5 * cot;
            coo.push(i, j, -w);
            coo.push(j, i, -w);
            diag[i] += w;
            diag[j] += w;
            mass[f[k]] += area / 3.0;
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        coo.push(i, i, d);
    }
    if let Some(v) = mass.iter().position(|&m| m <= 0.0) {
        return Err(Error::NumericalDegeneracy(format!("vertex {v} has no incident area")));
    }
    Ok(LaplacianPair {
        stiffness: CsrMatrix::from(&coo),
        mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tessellate_solid, Curve2D};
    use crate::synthetic;

    fn dense(lap: &LaplacianPair) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(lap.n(), lap.n());
        for (i, j, v) in lap.stiffness.triplet_iter() {
            d[(i, j)] += *v;
        }
        d
    }

    fn check_structure(lap: &LaplacianPair) {
        let k = dense(lap);
        for i in 0..lap.n() {
            let row = k.row(i);
            let scale = row.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(row.sum().abs() <= 1e-8 * scale, "row {i} sums to {}", row.sum());
            for j in 0..lap.n() {
                assert!((k[(i, j)] - k[(j, i)]).abs() <= 1e-14 * scale.max(1.0));
            }
        }
        assert!(lap.mass.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn tetrahedron_weights_equal() {
        let lap = build_laplacian_3d(&synthetic::unit_tetrahedron()).unwrap();
        check_structure(&lap);
        let k = dense(&lap);
        // Each edge sees two 60° angles: -(2 cot 60°)/2 = -1/√3.
        let w = -1.0 / 3f64.sqrt();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((k[(i, j)] - w).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_in_kernel_and_mass_is_area() {
        for mesh in [synthetic::icosphere(2), synthetic::torus(10, 6, 2.0, 0.7), synthetic::random_closed_mesh(80, 1)] {
            let lap = build_laplacian_3d(&mesh).unwrap();
            check_structure(&lap);
            let ones = nalgebra::DVector::from_element(lap.n(), 1.0);
            let r = &lap.stiffness * &ones;
            assert!(r.amax() <= 1e-8);
            let area: f64 = mesh.total_area();
            assert!((lap.total_mass() - area).abs() <= 1e-9 * area.max(1.0));
        }
    }

    #[test]
    fn square_hand_weights() {
        let c = Curve2D::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let s = tessellate_solid(&c, 1.0).unwrap();
        let lap = build_laplacian_2d(&s).unwrap();
        check_structure(&lap);
        let k = dense(&lap);
        // Find the diagonal shared by both triangles.
        let diag_edge = {
            let f = &s.faces;
            let shared: Vec<usize> = f[0].iter().copied().filter(|v| f[1].contains(v)).collect();
            (shared[0], shared[1])
        };
        for i in 0..4 {
            for j in (i + 1)..4 {
                let expected = if (i, j) == diag_edge || (j, i) == diag_edge {
                    // Opposite angles are both 90°: cot = 0.
                    0.0
                } else if j - i == 2 {
                    // The other diagonal is not an edge.
                    0.0
                } else {
                    // Boundary edge, one opposite 45° angle: -(cot 45°)/2.
                    -0.5
                };
                assert!((k[(i, j)] - expected).abs() < 1e-12, "({i},{j}) = {}", k[(i, j)]);
            }
        }
        assert!((lap.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solid_mass_is_polygon_area() {
        let pts: Vec<[f64; 2]> = (0..30)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 30.0;
                [2.0 * t.cos(), t.sin()]
            })
            .collect();
        let c = Curve2D::new(pts).unwrap();
        let s = tessellate_solid(&c, c.area() / 200.0).unwrap();
        let lap = build_laplacian_2d(&s).unwrap();
        check_structure(&lap);
        assert!((lap.total_mass() - c.area()).abs() <= 1e-9 * c.area());
    }
}
