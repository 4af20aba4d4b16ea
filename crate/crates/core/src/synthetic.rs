//! Procedural meshes for tests and the synthetic retrieval benchmark.
//!
//! The benchmark shapes are "pillows": closed surfaces inflated over a
//! star-shaped planar outline in the xz-plane, thin along y. The ring of
//! vertices at y = 0 traces the outline exactly, so cutting the undeformed
//! shape with that symmetry plane and projecting yields a query curve whose
//! points coincide with mesh vertices. Targets are non-rigid deformations
//! of the same vertex layout, which keeps ground-truth correspondences exact.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::cost::{CostMatrix, DEFAULT_TAU};
use crate::geometry::io::{load_curve, load_mesh, save_curve, save_mesh};
use crate::geometry::{Curve2D, TriMesh};
use crate::{Error, Result};

fn build(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> TriMesh {
    TriMesh::new(vertices, faces).expect("generated mesh is valid")
}

/// Regular tetrahedron inscribed in the cube [-1, 1]³.
pub fn tetrahedron() -> TriMesh {
    build(
        vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
}

/// Regular tetrahedron with unit edge length.
pub fn unit_tetrahedron() -> TriMesh {
    tetrahedron().scaled(1.0 / 8f64.sqrt())
}

/// Icosahedron on the unit sphere.
pub fn icosahedron() -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let vertices = raw.iter().map(|&v| normalize(v)).collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    build(vertices, faces)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / l, v[1] / l, v[2] / l]
}

/// Icosahedron subdivided `level` times and projected to the unit sphere
/// (12, 42, 162, 642, ... vertices).
pub fn icosphere(level: usize) -> TriMesh {
    let ico = icosahedron();
    let mut vertices = ico.vertices().to_vec();
    let mut faces = ico.faces().to_vec();
    for _ in 0..level {
        let mut midpoint = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                mid[k] = *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let (p, q) = (vertices[a], vertices[b]);
                    vertices.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    vertices.len() - 1
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push(mid);
        }
        faces = next;
    }
    build(vertices, faces)
}

/// Latitude-longitude sphere with poles on the z-axis:
/// `lon * (lat - 1) + 2` vertices.
pub fn uv_sphere(lon: usize, lat: usize) -> TriMesh {
    let (vertices, faces) = uv_layout(lon, lat, |theta, phi| {
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    });
    build(vertices, faces)
}

/// Vertex 0 is the pole at `theta = 0`, the last vertex the pole at
/// `theta = PI`; ring `k` (1-based) holds vertices `1 + (k-1)*lon ..`.
fn uv_layout(
    lon: usize,
    lat: usize,
    pos: impl Fn(f64, f64) -> [f64; 3],
) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    assert!(lon >= 3 && lat >= 2);
    let mut vertices = vec![pos(0.0, 0.0)];
    for k in 1..lat {
        let theta = PI * k as f64 / lat as f64;
        for l in 0..lon {
            vertices.push(pos(theta, TAU * l as f64 / lon as f64));
        }
    }
    vertices.push(pos(PI, 0.0));
    let south = vertices.len() - 1;
    let ring = |k: usize, l: usize| 1 + (k - 1) * lon + l % lon;
    let mut faces = Vec::new();
    for l in 0..lon {
        faces.push([0, ring(1, l), ring(1, l + 1)]);
        faces.push([south, ring(lat - 1, l + 1), ring(lat - 1, l)]);
    }
    for k in 1..lat - 1 {
        for l in 0..lon {
            faces.push([ring(k, l), ring(k + 1, l), ring(k + 1, l + 1)]);
            faces.push([ring(k, l), ring(k + 1, l + 1), ring(k, l + 1)]);
        }
    }
    (vertices, faces)
}

/// UV sphere with seeded radial jitter of up to ±15%.
pub fn jittered_sphere(lon: usize, lat: usize, seed: u64) -> TriMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = uv_sphere(lon, lat);
    let vertices = base
        .vertices()
        .iter()
        .map(|&v| {
            let s = 1.0 + rng.gen_range(-0.15..0.15);
            [v[0] * s, v[1] * s, v[2] * s]
        })
        .collect();
    build(vertices, base.faces().to_vec())
}

/// Closed mesh with roughly `n` vertices (at least 10), for random instances.
pub fn random_closed_mesh(n: usize, seed: u64) -> TriMesh {
    let lon = ((n as f64 / 2.0).sqrt().round() as usize).max(3) + 1;
    let lat = ((n.saturating_sub(2)) as f64 / lon as f64).round() as usize + 1;
    jittered_sphere(lon, lat.max(2), seed)
}

/// Bipyramid over a regular `k`-gon: `k + 2` vertices.
pub fn bipyramid(k: usize) -> TriMesh {
    let mut vertices: Vec<[f64; 3]> = (0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    vertices.push([0.0, 0.0, 1.1]);
    vertices.push([0.0, 0.0, -0.9]);
    let faces = (0..k)
        .flat_map(|i| {
            let j = (i + 1) % k;
            [[i, j, k], [j, i, k + 1]]
        })
        .collect();
    build(vertices, faces)
}

/// Triangle strip: `n` unit-spaced bottom vertices `(i, 0, 0)` followed by
/// `n - 1` top vertices `(i + 0.5, h, 0)`. For `h <= 0.5` the graph diameter
/// is `n - 1`, realized between the two bottom ends.
pub fn strip(n: usize, h: f64) -> TriMesh {
    assert!(n >= 2);
    let mut vertices: Vec<[f64; 3]> = (0..n).map(|i| [i as f64, 0.0, 0.0]).collect();
    vertices.extend((0..n - 1).map(|i| [i as f64 + 0.5, h, 0.0]));
    let top = |i: usize| n + i;
    let mut faces = Vec::new();
    for i in 0..n - 1 {
        faces.push([i, i + 1, top(i)]);
        if i + 1 < n - 1 {
            faces.push([i + 1, top(i + 1), top(i)]);
        }
    }
    build(vertices, faces)
}

pub fn torus(major: usize, minor: usize, r_major: f64, r_minor: f64) -> TriMesh {
    let mut vertices = Vec::with_capacity(major * minor);
    for i in 0..major {
        let u = TAU * i as f64 / major as f64;
        for j in 0..minor {
            let v = TAU * j as f64 / minor as f64;
            let rad = r_major + r_minor * v.cos();
            vertices.push([rad * u.cos(), rad * u.sin(), r_minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % major) * minor + j % minor;
    let mut faces = Vec::new();
    for i in 0..major {
        for j in 0..minor {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(vertices, faces)
}

/// Two round lobes joined by a narrow waist, elongated along x.
pub fn dumbbell(lon: usize, lat: usize) -> TriMesh {
    let (vertices, faces) = uv_layout(lon, lat, |theta, phi| {
        let x = 2.0 * theta.cos();
        let waist = 0.3 + 0.7 * (2.0 * theta).sin().abs();
        let r = theta.sin() * waist * 0.8;
        [x, r * phi.cos(), r * phi.sin()]
    });
    build(vertices, faces)
}

/// Star-shaped polygon with `m` vertices at seeded radii in `[0.6, 1.4]`.
pub fn random_star_curve(m: usize, seed: u64) -> Curve2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m)
        .map(|i| {
            let t = TAU * i as f64 / m as f64;
            let r = rng.gen_range(0.6..1.4);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    Curve2D::new(points).expect("star polygons are simple")
}

/// `m × n` cost matrix with independent uniform entries in `[0, 1)`.
pub fn random_costs(m: usize, n: usize, seed: u64) -> CostMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..m * n).map(|_| rng.gen::<f64>()).collect();
    CostMatrix::new(m, n, data, DEFAULT_TAU).expect("valid costs")
}

/// Random curve, mesh and costs for solver tests.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub curve: Curve2D,
    pub mesh: TriMesh,
    pub costs: CostMatrix,
}

/// Instance with an `m`-point curve and a mesh of roughly `n` vertices.
pub fn random_instance(m: usize, n: usize, seed: u64) -> RandomInstance {
    let mesh = random_closed_mesh(n, seed);
    RandomInstance {
        curve: random_star_curve(m, seed ^ 0x9e37_79b9),
        costs: random_costs(m, mesh.n_vertices(), seed ^ 0x7f4a_7c15),
        mesh,
    }
}

/// Closed walk of `m` mesh vertices: each step stays or moves to a
/// neighbor, and the last vertex equals or neighbors the first.
pub fn planted_walk(mesh: &TriMesh, m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..mesh.n_vertices());
    // Hop distances back to the start.
    let mut hops = vec![usize::MAX; mesh.n_vertices()];
    hops[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in mesh.neighbors(v) {
            if hops[w] == usize::MAX {
                hops[w] = hops[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut walk = vec![start];
    for t in 1..m {
        let cur = walk[t - 1];
        // After this step, m - t more steps must lead back into reach of start.
        let budget = m - t;
        let moves: Vec<usize> = mesh
            .neighbors(cur)
            .iter()
            .copied()
            .filter(|&w| hops[w] <= budget)
            .collect();
        let next = if moves.is_empty() || rng.gen_bool(0.15) && hops[cur] <= budget {
            cur
        } else {
            moves[rng.gen_range(0..moves.len())]
        };
        walk.push(next);
    }
    walk
}

/// Costs that vanish exactly on `(i, walk[i])` and equal 1 elsewhere.
pub fn planted_costs(walk: &[usize], n: usize) -> CostMatrix {
    CostMatrix::from_fn(walk.len(), n, DEFAULT_TAU, |i, j| if walk[i] == j { 0.0 } else { 1.0 })
        .expect("valid costs")
}

/// Outline families of the synthetic benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeClass {
    Oval,
    Trefoil,
    Cross,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 3] = [ShapeClass::Oval, ShapeClass::Trefoil, ShapeClass::Cross];

    pub fn name(self) -> &'static str {
        match self {
            ShapeClass::Oval => "oval",
            ShapeClass::Trefoil => "trefoil",
            ShapeClass::Cross => "cross",
        }
    }

    /// Outline radius at polar angle `alpha`.
    pub fn radius(self, alpha: f64) -> f64 {
        match self {
            ShapeClass::Oval => {
                let (a, b) = (1.6, 0.75);
                1.0 / ((alpha.cos() / a).powi(2) + (alpha.sin() / b).powi(2)).sqrt()
            }
            ShapeClass::Trefoil => 1.0 + 0.45 * (3.0 * alpha).cos(),
            ShapeClass::Cross => 1.0 + 0.45 * (4.0 * alpha).cos(),
        }
    }
}

/// Resolution and deformation strength of the synthetic benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PillowParams {
    /// Vertices per latitude ring; also the query length m.
    pub lon: usize,
    /// Latitude bands; must be even so a ring sits on y = 0.
    pub lat: usize,
    /// Half-thickness along y.
    pub thickness: f64,
    /// Scale of the random non-rigid deformation (0 = rigid copies).
    pub deformation: f64,
}

impl Default for PillowParams {
    fn default() -> Self {
        PillowParams {
            lon: 48,
            lat: 16,
            thickness: 0.25,
            deformation: 1.0,
        }
    }
}

/// Smooth closed surface over the outline of `class`.
///
/// `radius` perturbs the outline and `warp` maps the undeformed point.
fn pillow_with(
    params: &PillowParams,
    radius: impl Fn(f64) -> f64,
    warp: impl Fn([f64; 3]) -> [f64; 3],
) -> TriMesh {
    assert!(params.lat.is_multiple_of(2), "lat must be even");
    let h = params.thickness;
    let (vertices, faces) = uv_layout(params.lon, params.lat, |theta, alpha| {
        // theta runs from the +y pole (0) through the rim (PI/2) to the -y pole.
        let beta = PI / 2.0 - theta;
        let spread = beta.cos().max(0.0).powf(0.4);
        let r = radius(alpha) * spread;
        warp([r * alpha.cos(), h * beta.sin(), r * alpha.sin()])
    });
    build(vertices, faces)
}

/// Undeformed benchmark shape of `class`.
pub fn pillow(class: ShapeClass, params: &PillowParams) -> TriMesh {
    pillow_with(params, |a| class.radius(a), |p| p)
}

/// Indices of the rim ring (y = 0 on the undeformed pillow), in outline order.
pub fn rim_vertices(params: &PillowParams) -> Vec<usize> {
    let k = params.lat / 2;
    (0..params.lon).map(|l| 1 + (k - 1) * params.lon + l).collect()
}

/// Cut the undeformed pillow at its symmetry plane y = 0 and project the rim
/// onto the xz-plane. Returns the curve and, per curve point, its mesh vertex.
pub fn cut_and_project(class: ShapeClass, params: &PillowParams) -> (Curve2D, Vec<usize>) {
    let mesh = pillow(class, params);
    let rim = rim_vertices(params);
    let points = rim
        .iter()
        .map(|&v| {
            let p = mesh.vertex(v);
            [p[0], p[2]]
        })
        .collect();
    let curve = Curve2D::new(points).expect("pillow outline is a simple polygon");
    // Outline order is CCW in (x, z), so Curve2D keeps it as is.
    debug_assert_eq!(curve.len(), rim.len());
    (curve, rim)
}

/// Random non-rigid variant of the pillow of `class`: outline wobble, a
/// bend within the xz-plane, an out-of-plane fold, thickness change, and a
/// rigid motion.
pub fn deformed_pillow(class: ShapeClass, params: &PillowParams, seed: u64) -> TriMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = params.deformation;
    let wobble: Vec<(f64, f64, f64)> = (2..5)
        .map(|freq| (freq as f64, s * rng.gen_range(-0.04..0.04), rng.gen_range(0.0..TAU)))
        .collect();
    let bend = s * rng.gen_range(-0.35..0.35);
    let fold = s * rng.gen_range(-0.25..0.25);
    let thick = 1.0 + s * rng.gen_range(-0.2..0.2);
    let axis = normalize([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    let angle = rng.gen_range(0.0..TAU);
    let shift = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let rot = rotation(axis, angle);
    pillow_with(
        params,
        |a| {
            class.radius(a)
                * (1.0 + wobble.iter().map(|&(f, amp, ph)| amp * (f * a + ph).cos()).sum::<f64>())
        },
        |p| {
            let [x, y, z] = p;
            let y = y * thick;
            // In-plane bend: rotate about the y-axis by an angle growing with x.
            let t = bend * x;
            let (x, z) = (x * t.cos() - z * t.sin(), x * t.sin() + z * t.cos());
            let y = y + fold * x * x;
            let q = [
                rot[0][0] * x + rot[0][1] * y + rot[0][2] * z,
                rot[1][0] * x + rot[1][1] * y + rot[1][2] * z,
                rot[2][0] * x + rot[2][1] * y + rot[2][2] * z,
            ];
            [q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]]
        },
    )
}

/// Rotation matrix about a unit `axis` (Rodrigues).
pub fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let [x, y, z] = axis;
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Seeded random rigid motion applied to every vertex.
pub fn random_rigid_motion(mesh: &TriMesh, seed: u64) -> TriMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = normalize([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    let rot = rotation(axis, rng.gen_range(0.0..TAU));
    let shift = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
    mesh.map_vertices(|p| {
        let mut q = [0.0; 3];
        for r in 0..3 {
            q[r] = rot[r][0] * p[0] + rot[r][1] * p[1] + rot[r][2] * p[2] + shift[r];
        }
        q
    })
    .expect("rigid motion preserves validity")
}

/// One target of the synthetic benchmark.
#[derive(Debug, Clone)]
pub struct BenchmarkTarget {
    pub name: String,
    pub class: ShapeClass,
    pub mesh: TriMesh,
}

/// One query of the synthetic benchmark.
#[derive(Debug, Clone)]
pub struct BenchmarkQuery {
    pub name: String,
    pub class: ShapeClass,
    pub curve: Curve2D,
    /// Mesh vertex matching each curve point, valid on every target of the
    /// same class (all targets share the vertex layout).
    pub ground_truth: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub params: PillowParams,
    pub targets: Vec<BenchmarkTarget>,
    pub queries: Vec<BenchmarkQuery>,
}

/// Three classes, `per_class` deformed targets each, and one cut-and-project
/// query per class taken from the undeformed shape.
pub fn synthetic_benchmark(params: &PillowParams, per_class: usize, seed: u64) -> SyntheticBenchmark {
    let mut targets = Vec::new();
    let mut queries = Vec::new();
    for (c, class) in ShapeClass::ALL.into_iter().enumerate() {
        for t in 0..per_class {
            let s = seed
                .wrapping_mul(1000)
                .wrapping_add((c * 100 + t) as u64);
            targets.push(BenchmarkTarget {
                name: format!("{}_{t}", class.name()),
                class,
                mesh: deformed_pillow(class, params, s),
            });
        }
        let (curve, ground_truth) = cut_and_project(class, params);
        queries.push(BenchmarkQuery {
            name: format!("{}_query", class.name()),
            class,
            curve,
            ground_truth,
        });
    }
    SyntheticBenchmark {
        params: *params,
        targets,
        queries,
    }
}

/// Target entry of a fixture manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureTarget {
    pub name: String,
    pub class: ShapeClass,
    /// Path relative to the fixture directory.
    pub file: PathBuf,
}

/// Query entry of a fixture manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureQuery {
    pub name: String,
    pub class: ShapeClass,
    pub file: PathBuf,
    pub ground_truth: Vec<usize>,
}

/// MAP values measured on the fixture when it was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceResults {
    pub energy_map: f64,
    pub shapedna_map: f64,
    pub segment_map: f64,
    pub region_solve_fraction: f64,
}

/// `manifest.json` of a benchmark fixture directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub params: PillowParams,
    pub per_class: usize,
    pub seed: u64,
    /// Feature and matcher settings the reference results were obtained with.
    pub config: RunConfig,
    /// Minimum energy-ranking MAP the fixture must reach.
    pub map_threshold: f64,
    pub reference: Option<ReferenceResults>,
    pub targets: Vec<FixtureTarget>,
    pub queries: Vec<FixtureQuery>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
/// `name,class` rows for every target and query, next to the target meshes.
pub const LABELS_FILE: &str = "labels.csv";

impl FixtureManifest {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("serializable") + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes targets as OFF under `targets/`, queries as CSV under `queries/`,
/// a labels file and the manifest (without reference results).
pub fn write_fixture(
    bench: &SyntheticBenchmark,
    per_class: usize,
    seed: u64,
    config: &RunConfig,
    map_threshold: f64,
    dir: impl AsRef<Path>,
) -> Result<FixtureManifest> {
    let dir = dir.as_ref();
    create_dir(&dir.join("targets"))?;
    create_dir(&dir.join("queries"))?;
    let mut labels = String::from("name,class\n");
    let mut targets = Vec::new();
    for t in &bench.targets {
        let file = PathBuf::from("targets").join(format!("{}.off", t.name));
        save_mesh(&t.mesh, dir.join(&file), None)?;
        labels.push_str(&format!("{},{}\n", t.name, t.class.name()));
        targets.push(FixtureTarget {
            name: t.name.clone(),
            class: t.class,
            file,
        });
    }
    let mut queries = Vec::new();
    for q in &bench.queries {
        let file = PathBuf::from("queries").join(format!("{}.csv", q.name));
        save_curve(&q.curve, dir.join(&file), None)?;
        labels.push_str(&format!("{},{}\n", q.name, q.class.name()));
        queries.push(FixtureQuery {
            name: q.name.clone(),
            class: q.class,
            file,
            ground_truth: q.ground_truth.clone(),
        });
    }
    let labels_path = dir.join("targets").join(LABELS_FILE);
    std::fs::write(&labels_path, labels).map_err(|e| Error::io(&labels_path, e))?;
    let manifest = FixtureManifest {
        params: bench.params,
        per_class,
        seed,
        config: config.clone(),
        map_threshold,
        reference: None,
        targets,
        queries,
    };
    manifest.save(dir)?;
    Ok(manifest)
}

/// Reads a fixture directory written by [`write_fixture`].
pub fn load_fixture(dir: impl AsRef<Path>) -> Result<(FixtureManifest, SyntheticBenchmark)> {
    let dir = dir.as_ref();
    let manifest = FixtureManifest::load(dir)?;
    let targets = manifest
        .targets
        .iter()
        .map(|t| {
            Ok(BenchmarkTarget {
                name: t.name.clone(),
                class: t.class,
                mesh: load_mesh(dir.join(&t.file), None)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let queries = manifest
        .queries
        .iter()
        .map(|q| {
            Ok(BenchmarkQuery {
                name: q.name.clone(),
                class: q.class,
                curve: load_curve(dir.join(&q.file), None)?,
                ground_truth: q.ground_truth.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bench = SyntheticBenchmark {
        params: manifest.params,
        targets,
        queries,
    };
    Ok((manifest, bench))
}
