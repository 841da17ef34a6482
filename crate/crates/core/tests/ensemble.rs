use approx::{assert_abs_diff_eq, assert_relative_eq};
use bures_core::ensemble::*;
use bures_core::quadrature::Adaptive;

fn spec(n: usize, beta: f64) -> EnsembleSpec<f64> {
    EnsembleSpec::new(n, beta).unwrap()
}

/// Eigenvalues of the quadrature-built matrix, grouped into clusters, must
/// reproduce the closed-form spectrum value by value and count by count.
#[test]
fn quadrature_spectrum_matches_closed_form() {
    for n in 2..=5 {
        for beta in [0.5, 1.0, 2.0] {
            let s = spec(n, beta);
            let dense = averaged_matrix(&s).unwrap();
            let got = dense.eigh().unwrap().eigenvalues().to_vec();
            let want = expanded_spectrum(&s).unwrap();
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                assert_abs_diff_eq!(*g, *w, epsilon = 1e-7);
            }
            for b in eigen_branches(&s).unwrap() {
                let count = got.iter().filter(|&&l| (l - b.lambda()).abs() <= 1e-7).count();
                assert_eq!(count as u64, multiplicity_u64(n, b.q).unwrap(), "n={n} β={beta} q={}", b.q);
            }
        }
    }
}

#[test]
fn averaged_matrices_commute() {
    for n in [2, 3, 4] {
        let a = averaged_matrix(&spec(n, 0.7)).unwrap();
        let b = averaged_matrix(&spec(n, 2.5)).unwrap();
        let ab = a.matrix().matmul(b.matrix()).unwrap();
        let ba = b.matrix().matmul(a.matrix()).unwrap();
        assert!(ab.sub(&ba).unwrap().frobenius_norm() < 1e-8);
    }
}

#[test]
fn trace_identity_up_to_two_hundred() {
    for n in 1..=200 {
        for beta in [0.1, 1.0, 10.0] {
            assert_abs_diff_eq!(trace_identity(&spec(n, beta)).unwrap(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn eigenvalues_decrease_in_q() {
    for n in [2usize, 7, 30, 200] {
        for beta in [0.1, 1.0, 10.0] {
            let b = eigen_branches(&spec(n, beta)).unwrap();
            assert!(b.windows(2).all(|w| w[0].log_lambda > w[1].log_lambda));
            assert!(b.iter().all(|x| x.log_lambda.is_finite()));
        }
    }
}

#[test]
fn multiplicities_sum_to_dimension() {
    use num_bigint::BigUint;
    for n in [1usize, 2, 7, 40, 100] {
        let total: BigUint = (0..=n / 2).map(|q| multiplicity(n, q).unwrap()).sum();
        assert_eq!(total, BigUint::from(1u8) << n);
    }
}

#[test]
fn reference_metric_decreases_and_grows_with_n() {
    let betas: Vec<f64> = (0..=400).map(|i| 0.05 * (400f64).powf(i as f64 / 400.0)).collect();
    for n in 2..=7 {
        let g: Vec<f64> = betas.iter().map(|&b| reference_g_bb(n, b).unwrap()).collect();
        assert!(g.iter().all(|&x| x > 0.0));
        assert!(g.windows(2).all(|w| w[1] < w[0]), "n={n} not decreasing");
        if n < 7 {
            for &b in &betas {
                assert!(reference_g_bb(n + 1, b).unwrap() > reference_g_bb(n, b).unwrap());
            }
        }
    }
}

#[test]
fn gibbs_density_is_normalized() {
    for beta in [0.3f64, 1.0, 2.5, 7.0] {
        // E = x² tames the √E edge at zero; the exponential tail is cut at
        // e^{-βE} < 1e-30.
        let upper = (70.0 / beta).sqrt();
        let mass = Adaptive::new(10, 1e-12)
            .integrate(0.0, upper, |x: f64| 2.0 * x * gibbs_density(x * x, beta).unwrap())
            .unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
    }
}

/// With `E = −ln(1 − r²)` the Bloch radial weight is the Gibbs density
/// times the Jacobian `dE/dr = 2r/(1 − r²)`.
#[test]
fn bloch_weight_is_gibbs_in_energy() {
    for beta in [0.5, 1.0, 3.0] {
        for r in [0.1, 0.4, 0.8, 0.95] {
            let e = -(1.0f64 - r * r).ln();
            let lhs = radial_weight(r, beta).unwrap();
            let rhs = gibbs_density(e, beta).unwrap() * 2.0 * r / (1.0 - r * r);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }
}

#[test]
fn bloch_weight_integrates_to_one() {
    for beta in [0.5, 1.0, 2.0] {
        let mass = Adaptive::new(10, 1e-12)
            .integrate(0.0, std::f64::consts::FRAC_PI_2, |psi: f64| {
                radial_weight(psi.sin(), beta).unwrap() * psi.cos()
            })
            .unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);
    }
}
