mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use bures_core::bures::{bures_distance, metric_at, MetricTensor};
use bures_core::families::{ChartPoint, ComplexQubit, Conjugated, ParamFamily, Product, RealQubit};
use rand::Rng;

fn grid5() -> Vec<ChartPoint<f64>> {
    let mut pts = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            pts.push(ChartPoint::polar(0.1 + 0.175 * i as f64, 0.3 + 1.3 * j as f64));
        }
    }
    pts
}

#[test]
fn leibniz_derivatives_match_finite_differences() {
    for n in 1..=5 {
        let fam: Box<dyn ParamFamily<f64>> = if n == 1 {
            Box::new(RealQubit)
        } else {
            Box::new(Product::real(n).unwrap())
        };
        for p in grid5() {
            for axis in 0..2 {
                let exact = fam.derivative(&p, axis).unwrap();
                let fd = fam.finite_difference(&p, axis, 1e-5).unwrap();
                let scale = exact.matrix().frobenius_norm();
                let err = exact.sub(&fd).unwrap().matrix().frobenius_norm();
                assert!(err <= 1e-6 * scale, "n={n} {p:?} axis {axis}: {err:e} vs {scale:e}");
                assert_abs_diff_eq!(exact.trace(), 0.0, epsilon = 1e-13);
            }
        }
    }
}

#[test]
fn real_product_metric_closed_forms() {
    for n in 1..=5 {
        let fam = Product::<f64>::real(n).unwrap();
        for p in grid5() {
            let r = p.get(0);
            let g = metric_at(&fam, &p).unwrap();
            let nf = n as f64;
            assert_abs_diff_eq!(g.get(0, 0), nf / (4.0 * (1.0 - r * r)), epsilon = 1e-8);
            assert_abs_diff_eq!(g.get(0, 1), 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(g.get(1, 1), nf * r * r / 4.0, epsilon = 1e-8);
        }
    }
}

#[test]
fn complex_qubit_metric_closed_forms() {
    let mut rng = common::rng(7);
    for _ in 0..20 {
        let (r, t, f) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.0..2.0 * PI));
        let g = metric_at(&ComplexQubit, &ChartPoint::spherical(r, t, f)).unwrap();
        let want = MetricTensor::diagonal(&[
            1.0 / (4.0 * (1.0 - r * r)),
            r * r / 4.0,
            r * r * t.sin().powi(2) / 4.0,
        ]);
        assert!(g.max_abs_diff(&want) < 1e-8, "{g:?}");
    }
}

#[test]
fn two_fold_complex_metric_doubles() {
    let two = Product::<f64>::complex(2).unwrap();
    let mut rng = common::rng(11);
    for _ in 0..10 {
        let p = ChartPoint::spherical(rng.gen_range(0.05..0.9), rng.gen_range(0.1..3.0), rng.gen_range(0.0..6.0));
        let single = metric_at(&ComplexQubit, &p).unwrap();
        let double = metric_at(&two, &p).unwrap();
        assert!(double.max_abs_diff(&single.scale(2.0)) < 1e-7);
    }
}

#[test]
fn metric_is_invariant_under_unitary_conjugation() {
    let mut rng = common::rng(3);
    let cases: Vec<(Arc<dyn ParamFamily<f64>>, ChartPoint<f64>)> = vec![
        (Arc::new(RealQubit), ChartPoint::polar(0.6, 0.4)),
        (Arc::new(ComplexQubit), ChartPoint::spherical(0.3, 1.1, 2.0)),
        (Arc::new(Product::real(3).unwrap()), ChartPoint::polar(0.45, 2.2)),
        (Arc::new(Product::complex(2).unwrap()), ChartPoint::spherical(0.7, 0.8, 4.0)),
    ];
    for (fam, p) in cases {
        let u = common::random_unitary(&mut rng, fam.dim());
        let rotated = Conjugated::new(fam.clone(), u).unwrap();
        let a = metric_at(fam.as_ref(), &p).unwrap();
        let b = metric_at(&rotated, &p).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-9, "{}", fam.label());
    }
}

#[test]
fn non_unitary_conjugation_rejected() {
    let mut rng = common::rng(5);
    let g = common::ginibre(&mut rng, 2);
    assert!(Conjugated::new(Arc::new(RealQubit) as Arc<dyn ParamFamily<f64>>, g).is_err());
}

/// `d_B²(ρ(x), ρ(x + εv)) = ε² g(v, v) + O(ε³)`: the residual divided by ε²
/// must shrink at least linearly in ε.
#[test]
fn metric_agrees_with_distance_to_third_order() {
    let cases: Vec<(Box<dyn ParamFamily<f64>>, ChartPoint<f64>, Vec<f64>)> = vec![
        (Box::new(RealQubit), ChartPoint::polar(0.5, 1.0), vec![0.6, -0.8]),
        (Box::new(ComplexQubit), ChartPoint::spherical(0.4, 1.2, 0.7), vec![0.3, 0.5, -0.8]),
        (Box::new(Product::real(3).unwrap()), ChartPoint::polar(0.35, 2.5), vec![1.0, 0.4]),
        (Box::new(Product::complex(2).unwrap()), ChartPoint::spherical(0.6, 2.0, 3.0), vec![-0.2, 0.9, 0.4]),
    ];
    for (fam, p, v) in cases {
        let rho = fam.density(&p).unwrap();
        let g = metric_at(fam.as_ref(), &p).unwrap();
        let q = g.quadratic_form(&v);
        let resid = |eps: f64| {
            let dv: Vec<f64> = v.iter().map(|x| x * eps).collect();
            let other = fam.density(&p.displaced(&dv)).unwrap();
            let d2 = bures_distance(&rho, &other).unwrap().squared();
            (d2 / (eps * eps) - q).abs()
        };
        let (coarse, fine) = (resid(2e-2), resid(1e-2));
        assert!(coarse < 0.1 * q, "{}: {coarse:e}", fam.label());
        assert!(fine <= 0.6 * coarse + 1e-7, "{}: {coarse:e} -> {fine:e}", fam.label());
    }
}
