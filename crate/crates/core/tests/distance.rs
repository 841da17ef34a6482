mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use bures_core::bures::*;
use bures_core::ensemble::{averaged_matrix, reference_g_bb, EnsembleSpec};
use bures_core::linalg::{DensityMatrix, HermitianMatrix};

fn spec(n: usize, beta: f64) -> EnsembleSpec<f64> {
    EnsembleSpec::new(n, beta).unwrap()
}

fn closed_form_sq(n: usize, b1: f64, b2: f64) -> f64 {
    let d = (3.0 + 2.0 * b1) * (3.0 + 2.0 * b2);
    match n {
        2 => 2.0 - (b1 * b2 / d).sqrt() - 3.0 * ((2.0 + b1) * (2.0 + b2) / d).sqrt(),
        3 => 2.0 - 2.0 * (b1 * b2 / d).sqrt() - 2.0 * ((3.0 + b1) * (3.0 + b2) / d).sqrt(),
        _ => unreachable!(),
    }
}

#[test]
fn commuting_distance_matches_two_and_three_qubit_forms() {
    let betas = [0.1, 0.5, 1.0, 2.0, 3.0, 7.5, 20.0];
    for n in [2, 3] {
        for &b1 in &betas {
            for &b2 in &betas {
                let got = bures_distance_commuting(&spec(n, b1), &spec(n, b2)).unwrap();
                let want = closed_form_sq(n, b1, b2);
                // On the diagonal the direct form cancels to ~1e-16, whose
                // square root is ~1e-8, so values are compared off it only.
                assert_abs_diff_eq!(got.squared(), want, epsilon = 1e-10);
                if b1 != b2 {
                    assert_abs_diff_eq!(got.value(), want.sqrt(), epsilon = 1e-10);
                }
            }
        }
    }
    let want = (2.0 - 2.0 * (2.0f64 / 35.0).sqrt() - 2.0 * (20.0f64 / 35.0).sqrt()).sqrt();
    let got = bures_distance_commuting(&spec(3, 1.0), &spec(3, 2.0)).unwrap().value();
    assert_abs_diff_eq!(got, want, epsilon = 1e-10);
}

#[test]
fn commuting_distance_matches_dense() {
    for n in 2..=5 {
        let dense: Vec<_> = [0.5, 1.0, 3.0]
            .iter()
            .map(|&b| (b, averaged_matrix(&spec(n, b)).unwrap()))
            .collect();
        for (b1, r1) in &dense {
            for (b2, r2) in &dense {
                let fast = bures_distance_commuting(&spec(n, *b1), &spec(n, *b2)).unwrap();
                let full = bures_distance(r1, r2).unwrap();
                assert_abs_diff_eq!(fast.squared(), full.squared(), epsilon = 1e-8);
            }
        }
    }
}

#[test]
fn stable_and_textbook_fast_paths_agree() {
    for n in [2usize, 10, 100, 400] {
        for (b1, b2) in [(0.2, 0.3), (1.0, 5.0), (4.0, 4.001)] {
            let a = bures_distance_commuting(&spec(n, b1), &spec(n, b2)).unwrap();
            let b = bures_distance_commuting_fidelity(&spec(n, b1), &spec(n, b2)).unwrap();
            assert_abs_diff_eq!(a.squared(), b.squared(), epsilon = 1e-12);
        }
    }
}

#[test]
fn commuting_distance_symmetric_and_bounded() {
    for n in [2usize, 50, 100] {
        for b1 in [0.05, 0.7, 3.0, 5.0] {
            for b2 in [0.05, 0.9, 2.0, 5.0] {
                let a = bures_distance_commuting(&spec(n, b1), &spec(n, b2)).unwrap().value();
                let b = bures_distance_commuting(&spec(n, b2), &spec(n, b1)).unwrap().value();
                assert_eq!(a, b);
                assert!((0.0..=2f64.sqrt()).contains(&a));
            }
        }
    }
}

#[test]
fn ensemble_metric_matches_reference_forms() {
    for n in 2..=7 {
        for beta in [0.5, 1.0, 2.0, 5.0] {
            let want = reference_g_bb(n, beta).unwrap();
            let hs = hs_on_roots_metric(&spec(n, beta), default_step(beta).min(beta / 2.0)).unwrap();
            let md = metric_from_distance(ensemble_distance(n), beta, default_step(beta).min(beta / 4.0)).unwrap();
            assert_relative_eq!(hs, want, max_relative = 1e-5);
            assert_relative_eq!(md, want, max_relative = 1e-5);
        }
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = common::rng(2024);
    for k in 0..100 {
        let dim = 2 + k % 15;
        let (a, b, c) = (
            common::random_density(&mut rng, dim),
            common::random_density(&mut rng, dim),
            common::random_density(&mut rng, dim),
        );
        let ab = bures_distance(&a, &b).unwrap().value();
        let bc = bures_distance(&b, &c).unwrap().value();
        let ac = bures_distance(&a, &c).unwrap().value();
        assert!(ac <= ab + bc + 1e-9, "dim {dim}: {ac} > {ab} + {bc}");
    }
}

#[test]
fn dense_distance_symmetric_and_unitarily_invariant() {
    let mut rng = common::rng(99);
    for dim in [2usize, 3, 5, 8] {
        let a = common::random_density(&mut rng, dim);
        let b = common::random_density(&mut rng, dim);
        let d = bures_distance(&a, &b).unwrap().value();
        assert_abs_diff_eq!(d, bures_distance(&b, &a).unwrap().value(), epsilon = 1e-10);
        let u = common::random_unitary(&mut rng, dim);
        let rot = |r: &DensityMatrix<f64>| {
            DensityMatrix::new(r.hermitian().conjugate_by(&u).unwrap()).unwrap()
        };
        assert_abs_diff_eq!(d, bures_distance(&rot(&a), &rot(&b)).unwrap().value(), epsilon = 1e-10);
    }
    let diag = |v: &[f64]| DensityMatrix::new(HermitianMatrix::diagonal(v)).unwrap();
    let p = diag(&[0.7, 0.2, 0.1]);
    let q = diag(&[0.1, 0.3, 0.6]);
    let want = 2.0 - 2.0 * ((0.07f64).sqrt() + (0.06f64).sqrt() + (0.06f64).sqrt());
    assert_abs_diff_eq!(bures_distance(&p, &q).unwrap().squared(), want, epsilon = 1e-12);
}
