use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use tdirac_core::error::Error;
use tdirac_core::geometry::{load_model, parse_model, ModelSpec};
use tdirac_core::spectral::*;
use tdirac_core::weitzenbock::*;

fn spec(name: &str) -> ModelSpec {
    load_model(format!("{}/../../models/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn landau() -> TorusBundle {
    TorusBundle::from_spec(&spec("t3_landau")).unwrap()
}

fn grid(n: usize) -> GridConfig {
    GridConfig { solver: Solver::Dense, ..GridConfig::new(n) }
}

#[test]
fn free_torus_matches_discrete_fourier_modes() {
    let b = TorusBundle::from_spec(&spec("flat_t3")).unwrap();
    let n = 12;
    let op = discretize_square(&b, 0, &grid(n)).unwrap();
    let ev = dense_eigenvalues(&op.sector(false));
    // Even sector of the r = 2 twisted fiber: two copies of the scalar
    // lattice Laplacian 4N²(sin²(πa/N) + sin²(πb/N)).
    let s2 = |j: usize| 4.0 * (n * n) as f64 * (PI * j as f64 / n as f64).sin().powi(2);
    let mut exact: Vec<f64> = (0..n * n).flat_map(|s| [s2(s / n) + s2(s % n); 2]).collect();
    exact.sort_by(f64::total_cmp);
    assert_eq!(ev.len(), exact.len());
    for (a, e) in ev.iter().zip(&exact) {
        assert!((a - e).abs() < 1e-9 * e.max(1.0), "{a} vs {e}");
    }
}

#[test]
fn landau_plaquette_phase_and_chern_number() {
    let b = landau();
    assert_eq!(b.chern_numbers(1).unwrap(), vec![(1, 2, 1)]);
    assert_eq!(b.chern_numbers(3).unwrap(), vec![(1, 2, 3)]);
    let setup = b.setup(1).unwrap();
    let lat = Lattice::for_setup(&setup, 16, 1).unwrap();
    // Holonomy exp(∮A) = exp(h²F) with F = −2πi.
    let expect = Complex64::from_polar(1.0, -TAU / 256.0);
    for s in [0, 17, 255] {
        assert!((lat.plaquette(0, 1, s) - expect).norm() < 1e-12);
    }
    assert_eq!(discretize_square(&b, 1, &grid(16)).unwrap().hermitian_defect(), 0.0);
}

#[test]
fn non_integer_flux_and_non_torus_are_rejected() {
    let half = parse_model(
        r#"{ "name": "half", "p": 1, "q": 2, "brackets": [],
             "line_bundle": { "B": [["0", "-1/2i"], ["1/2i", "0"]], "scale": "2pi" } }"#,
    )
    .unwrap();
    let b = TorusBundle::from_spec(&half).unwrap();
    assert!(matches!(b.setup(1), Err(Error::NonIntegerChern(c, 1, 2)) if (c - 0.5).abs() < 1e-12));
    assert!(b.setup(2).is_ok());
    let unit = TorusBundle::from_spec(&spec("flat_t3")).unwrap();
    assert!(matches!(unit.chern_numbers(1), Err(Error::NonIntegerChern(..))));
    assert!(matches!(TorusBundle::from_spec(&spec("heisenberg")), Err(Error::NotTorus(_))));
}

#[test]
fn operators_are_exactly_hermitian_in_every_gauge() {
    let b = landau();
    for k in 0..=3 {
        for seed in [None, Some(5), Some(77)] {
            let g = GridConfig { gauge_seed: seed, ..grid(8) };
            assert_eq!(discretize_square(&b, k, &g).unwrap().hermitian_defect(), 0.0);
            assert_eq!(discretize_bochner(&b, k, &g).unwrap().hermitian_defect(), 0.0);
        }
    }
}

#[test]
fn spectrum_is_gauge_invariant() {
    let b = landau();
    for k in [1, 2] {
        let plain = discretize_square(&b, k, &grid(10)).unwrap();
        let gauged = discretize_square(&b, k, &GridConfig { gauge_seed: Some(k as u64), ..grid(10) }).unwrap();
        assert_ne!(plain.matrix, gauged.matrix);
        let (x, y) = (dense_eigenvalues(&plain.matrix), dense_eigenvalues(&gauged.matrix));
        let worst = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-10, "k={k}: {worst:e}");
    }
}

#[test]
fn dense_and_lanczos_agree_on_landau_operator() {
    let op = discretize_square(&landau(), 1, &grid(12)).unwrap();
    let dense = eigen(&op.matrix, 20, Solver::Dense).unwrap();
    // Levels are at most doubly degenerate here, so a block of 4 suffices.
    let it = lanczos_detailed(&op.matrix, 20, LanczosOptions { block: 4, ..Default::default() }).unwrap();
    assert!(!it.dense_fallback, "Krylov space filled the matrix");
    for (a, b) in dense.iter().zip(&it.values) {
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn landau_levels_kernels_and_gap_at_n16() {
    let b = landau();
    let reports = gap_scan(&b, 1..=4, &grid(16)).unwrap();
    for (r, k) in reports.iter().zip(1..) {
        assert_eq!(r.k, k);
        assert!((r.two_km - 4.0 * PI * k as f64).abs() < 1e-12);
        assert!((r.gap / r.two_km - 1.0).abs() < 0.05, "k={k}: {}", r.gap);
        assert_eq!(r.kernel_dim_odd, 0);
        assert_eq!(r.kernel_dim_even, k as usize);
    }
    for w in reports.windows(2) {
        assert!(w[1].gap > w[0].gap);
    }
    // k = 0 is the free Laplacian: its gap is the lattice Fourier mode,
    // larger than the first Landau gap, and the odd kernel is nonzero.
    let r0 = analyze(&b, 0, &grid(16)).unwrap();
    assert!((r0.gap - 4.0 * 256.0 * (PI / 16.0).sin().powi(2)).abs() < 1e-9);
    assert!(r0.gap > reports[0].gap);
    assert_eq!((r0.kernel_dim_even, r0.kernel_dim_odd), (1, 1));
    assert!(r0.min_eigenvalue.abs() < 1e-9);
}

#[test]
fn gap_error_is_second_order_in_the_grid() {
    let b = landau();
    let err = |n: usize| (analyze(&b, 1, &grid(n)).unwrap().gap - 4.0 * PI).abs();
    for (coarse, fine) in [(8, 16), (12, 24)] {
        let ratio = err(coarse) / err(fine);
        assert!((3.5..4.5).contains(&ratio), "{coarse}→{fine}: {ratio}");
    }
}

#[test]
fn negative_part_is_a_lattice_artifact_of_order_n_minus_two() {
    // The lowest Landau level of the lattice sits θ²h²/8 below the continuum.
    let b = landau();
    for n in [8, 16] {
        for k in [1, 3] {
            let r = analyze(&b, k, &grid(n)).unwrap();
            let theta = TAU * k as f64;
            let bound = theta * theta / (8.0 * (n * n) as f64);
            assert!(r.min_eigenvalue < 0.0);
            assert!(r.min_eigenvalue >= -1.05 * bound, "N={n} k={k}: {} vs {bound}", r.min_eigenvalue);
        }
    }
}

#[test]
fn bochner_bound_is_uniform_in_k() {
    let rows = bochner_bound(&landau(), 0..=4, &grid(16)).unwrap();
    assert!(rows[0].min_eig.abs() < 1e-9);
    for r in &rows {
        assert!(r.c_k <= 0.5, "{r:?}");
    }
    assert!((rows[1].min_eig / TAU - 1.0).abs() < 0.05);
}

#[test]
fn full_lattice_repeats_the_leafwise_spectrum() {
    // D_k² has no leaf derivatives, so each leaf site carries a copy.
    let b = landau();
    let reduced = dense_eigenvalues(&discretize_square(&b, 1, &grid(6)).unwrap().matrix);
    let full = dense_eigenvalues(&discretize_square(&b, 1, &GridConfig { leaf_points: 3, ..grid(6) }).unwrap().matrix);
    assert_eq!(full.len(), 3 * reduced.len());
    for (i, x) in reduced.iter().enumerate() {
        for y in &full[3 * i..3 * i + 3] {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn cross_validation_matches_symbolic_square() {
    let b = landau();
    let s = b.setup(1).unwrap();
    let lat = Lattice::for_setup(&s, 8, 1).unwrap();
    let d = build_dirac(&s);
    let rhs = build_lichnerowicz_rhs(&s).unwrap();
    let r = cross_validate(&d.compose(&d).unwrap(), &rhs, &lat, 20, 1).unwrap();
    assert!(r.relative <= 1e-8, "{r:?}");
    let same = cross_validate(&rhs, &rhs, &lat, 3, 2).unwrap();
    assert_eq!((same.relative, same.absolute), (0.0, 0.0));
    // Corrupting K by ΔK shifts the right-hand side by ΔK/4.
    let bad = rhs.add(&DiffOp::scalar(&s, Complex64::new(0.5 / 4.0, 0.0))).unwrap();
    let r = cross_validate(&d.compose(&d).unwrap(), &bad, &lat, 5, 3).unwrap();
    assert!((r.absolute - 0.125).abs() < 1e-9, "{r:?}");
}

#[test]
fn crosscheck_suite_passes_and_detects_mutation() {
    for k in [1, 2] {
        let rows = crosscheck_suite(&landau(), k, 8, 5, 11, 1e-8).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.passed), "{rows:#?}");
    }
    let bad = TorusBundle::from_spec(&spec("t3_landau_mutated")).unwrap();
    let rows = crosscheck_suite(&bad, 1, 8, 5, 11, 1e-8).unwrap();
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.label).collect();
    assert_eq!(failed, vec!["a", "d", "i"]);
}
