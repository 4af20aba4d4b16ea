use elastic_core::container::{
    basis_from_bytes, basis_to_bytes, cost_from_bytes, cost_to_bytes, descriptor_from_bytes, descriptor_to_bytes,
};
use elastic_core::evaluation::{average_precision, cumulative_curve, default_thresholds, RankEntry, RetrievalRanking};
use elastic_core::geometry::GeodesicCache;
use elastic_core::matcher::{branch_and_bound_match, exhaustive_match};
use elastic_core::pipeline::{extract_mesh_features, normalize_mesh};
use elastic_core::spectral::{build_laplacian_3d, compute_hks, eigendecompose};
use elastic_core::synthetic;
use elastic_core::RunConfig;
use proptest::prelude::*;

fn triangle_area(p: [f64; 3], q: [f64; 3], r: [f64; 3]) -> f64 {
    let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let v = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
    let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

fn small_config() -> RunConfig {
    RunConfig {
        k: 10,
        d: 16,
        r: 3,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_invariants(n in 12usize..120, seed in any::<u64>()) {
        let mesh = synthetic::random_closed_mesh(n, seed);
        let lap = build_laplacian_3d(&mesh).unwrap();
        let nv = mesh.n_vertices();
        let mut dense = vec![vec![0.0; nv]; nv];
        for (i, j, v) in lap.stiffness.triplet_iter() {
            dense[i][j] += v;
        }
        for (i, row) in dense.iter().enumerate() {
            let max = row.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            prop_assert!(row.iter().sum::<f64>().abs() <= 1e-8 * max);
            for (j, x) in row.iter().enumerate() {
                prop_assert!((x - dense[j][i]).abs() <= 1e-12 * max.max(1.0));
            }
        }
        prop_assert!(lap.mass.iter().all(|&m| m > 0.0));
        let v = mesh.vertices();
        let area: f64 = mesh.faces().iter().map(|f| triangle_area(v[f[0]], v[f[1]], v[f[2]])).sum();
        prop_assert!((lap.total_mass() - area).abs() <= 1e-9 * area);
    }

    #[test]
    fn spectrum_is_nonnegative_and_sorted(n in 30usize..150, seed in any::<u64>()) {
        let mesh = synthetic::random_closed_mesh(n, seed);
        let b = eigendecompose(&build_laplacian_3d(&mesh).unwrap(), 8).unwrap();
        prop_assert!(b.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(b.eigenvalues[0] >= 0.0 && b.eigenvalues[0] <= 1e-6 * b.eigenvalues[1]);
    }

    #[test]
    fn containers_round_trip(n in 30usize..100, seed in any::<u64>()) {
        let (mesh, _) = normalize_mesh(&synthetic::random_closed_mesh(n, seed)).unwrap();
        let f = extract_mesh_features(&mesh, &small_config()).unwrap();
        prop_assert_eq!(basis_from_bytes(&basis_to_bytes(&f.basis)).unwrap(), f.basis.clone());
        prop_assert_eq!(descriptor_from_bytes(&descriptor_to_bytes(&f.hks)).unwrap(), f.hks.clone());
        let costs = synthetic::random_costs(7, mesh.n_vertices(), seed);
        prop_assert_eq!(cost_from_bytes(&cost_to_bytes(&costs)).unwrap(), costs);
    }

    #[test]
    fn hks_is_max_normalized(n in 20usize..120, seed in any::<u64>(), d in 1usize..40) {
        let mesh = synthetic::random_closed_mesh(n, seed);
        let b = eigendecompose(&build_laplacian_3d(&mesh).unwrap(), 6).unwrap();
        let h = compute_hks(&b, d).unwrap();
        prop_assert_eq!(h.values.iter().cloned().fold(f64::MIN, f64::max), 1.0);
        prop_assert!(h.values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn solvers_agree(m in 3usize..12, n in 12usize..80, seed in any::<u64>()) {
        let inst = synthetic::random_instance(m, n, seed);
        let geo = GeodesicCache::new(&inst.mesh);
        let ex = exhaustive_match(&inst.costs, &inst.curve, &inst.mesh).unwrap();
        let bb = branch_and_bound_match(&inst.costs, &inst.curve, &inst.mesh, &geo).unwrap();
        prop_assert_eq!(ex.energy(), bb.energy());
        prop_assert!(bb.stats.paths_solved <= 2 * inst.mesh.n_vertices());
    }
}

proptest! {
    #[test]
    fn cumulative_curves_are_monotone(errors in prop::collection::vec(0.0f64..=1.0, 1..200), count in 2usize..50) {
        let c = cumulative_curve(&errors, &default_thresholds(count));
        prop_assert!(c.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*c.last().unwrap(), 1.0);
    }

    #[test]
    fn average_precision_bounds(mask in prop::collection::vec(any::<bool>(), 1..30)) {
        prop_assume!(mask.iter().any(|&b| b));
        let entries = mask
            .iter()
            .enumerate()
            .map(|(i, &pos)| RankEntry {
                target: format!("t{i:03}"),
                class: Some(if pos { "p" } else { "q" }.to_string()),
                score: i as f64,
            })
            .collect();
        let ranking = RetrievalRanking::new("query", entries).unwrap();
        let ap = average_precision(&ranking, "p").unwrap();
        prop_assert!(ap > 0.0 && ap <= 1.0);
        let hits = mask.iter().filter(|&&b| b).count();
        let leading = mask.iter().take_while(|&&b| b).count();
        prop_assert_eq!(ap == 1.0, leading == hits);
    }
}
