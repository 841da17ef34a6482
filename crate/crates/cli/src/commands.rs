//! The on-demand subcommands. Each returns the text it would print.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{bail, ensure, Result};
use bures_core::bures::{bures_distance, bures_distance_commuting};
use bures_core::ensemble::{averaged_matrix, EnsembleSpec, MAX_DENSE_N};
use bures_core::families::{ChartPoint, ComplexQubit, ParamFamily, Product, RealQubit};
use bures_core::geometry::{
    gaussian_curvature_2d, normalize_prior, scalar_curvature, scalar_curvature_diag3, ChartKind,
    DomainSpec, MetricField,
};
use clap::ValueEnum;

use crate::figure::format_value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Real qubit, `(r, θ)`.
    Real,
    /// Complex qubit, `(r, θ, φ)`.
    Complex,
    /// `n`-fold tensor power of the real qubit.
    RealProduct,
    /// `n`-fold tensor power of the complex qubit.
    ComplexProduct,
    /// `n`-qubit thermal ensemble, `β`.
    Ensemble,
}

impl FamilyKind {
    fn coordinate_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Real | FamilyKind::RealProduct => &["r", "theta"],
            FamilyKind::Complex | FamilyKind::ComplexProduct => &["r", "theta", "phi"],
            FamilyKind::Ensemble => &["beta"],
        }
    }
}

fn resolve_n(kind: FamilyKind, n: Option<usize>) -> Result<usize> {
    match kind {
        FamilyKind::Real | FamilyKind::Complex => {
            ensure!(n.unwrap_or(1) == 1, "--n does not apply to the single-qubit {kind:?} family");
            Ok(1)
        }
        _ => {
            let n = n.ok_or_else(|| anyhow::anyhow!("--n is required for the {kind:?} family"))?;
            ensure!(n >= 1, "--n must be at least 1");
            Ok(n)
        }
    }
}

pub fn family(kind: FamilyKind, n: Option<usize>) -> Result<Arc<dyn ParamFamily<f64>>> {
    let n = resolve_n(kind, n)?;
    Ok(match kind {
        FamilyKind::Real => Arc::new(RealQubit),
        FamilyKind::Complex => Arc::new(ComplexQubit),
        FamilyKind::RealProduct => Arc::new(Product::real(n)?),
        FamilyKind::ComplexProduct => Arc::new(Product::complex(n)?),
        FamilyKind::Ensemble => bail!("the ensemble is not a density-matrix chart; use it with metric, prior or distance"),
    })
}

pub fn field(kind: FamilyKind, n: Option<usize>) -> Result<MetricField<f64>> {
    if kind == FamilyKind::Ensemble {
        return Ok(MetricField::ensemble(resolve_n(kind, n)?)?);
    }
    let chart = match kind {
        FamilyKind::Real | FamilyKind::RealProduct => ChartKind::Polar,
        _ => ChartKind::Spherical,
    };
    Ok(MetricField::from_family(family(kind, n)?, chart))
}

fn point(kind: FamilyKind, at: &[f64]) -> Result<ChartPoint<f64>> {
    let names = kind.coordinate_names();
    ensure!(
        at.len() == names.len(),
        "--at needs {} values ({}), got {}",
        names.len(),
        names.join(","),
        at.len()
    );
    Ok(ChartPoint::new(at.to_vec()))
}

pub fn cmd_metric(kind: FamilyKind, n: Option<usize>, at: &[f64]) -> Result<String> {
    let p = point(kind, at)?;
    let g = field(kind, n)?.eval(&p)?;
    let names = kind.coordinate_names();
    let mut out = String::new();
    for a in 0..g.dim() {
        for b in a..g.dim() {
            writeln!(out, "g_{}{} = {}", names[a], names[b], format_value(g.get(a, b)))?;
        }
    }
    writeln!(out, "sqrt_det = {}", format_value(g.determinant().max(0.0).sqrt()))?;
    Ok(out)
}

pub fn cmd_curvature(kind: FamilyKind, n: Option<usize>, at: &[f64]) -> Result<String> {
    ensure!(
        kind != FamilyKind::Ensemble,
        "a one-parameter family has no intrinsic curvature"
    );
    let p = point(kind, at)?;
    let f = field(kind, n)?;
    let mut out = String::new();
    if f.dim() == 2 {
        writeln!(out, "gaussian_curvature = {}", format_value(gaussian_curvature_2d(&f, &p)?))?;
        writeln!(out, "scalar_curvature = {}", format_value(scalar_curvature(&f, &p)?))?;
    } else {
        writeln!(out, "scalar_curvature = {}", format_value(scalar_curvature_diag3(&f, &p)?))?;
    }
    Ok(out)
}

pub fn cmd_distance(n: usize, beta1: f64, beta2: f64, dense_check: bool) -> Result<String> {
    let s1 = EnsembleSpec::new(n, beta1)?;
    let s2 = EnsembleSpec::new(n, beta2)?;
    let fast = bures_distance_commuting(&s1, &s2)?.value();
    let mut out = format!("d_bures = {}\n", format_value(fast));
    if dense_check {
        ensure!(
            n <= 5,
            "the dense cross-check builds 2^n × 2^n matrices and is limited to n ≤ 5 (largest materializable: {MAX_DENSE_N})"
        );
        let dense = bures_distance(&averaged_matrix(&s1)?, &averaged_matrix(&s2)?)?.value();
        writeln!(out, "d_bures_dense = {}", format_value(dense))?;
        writeln!(out, "difference = {}", format_value((fast - dense).abs()))?;
    }
    Ok(out)
}

pub fn cmd_prior(
    kind: FamilyKind,
    n: Option<usize>,
    normalizer_only: bool,
    at: Option<&[f64]>,
) -> Result<String> {
    let domain = match kind {
        FamilyKind::Real | FamilyKind::RealProduct => DomainSpec::Disk,
        FamilyKind::Complex | FamilyKind::ComplexProduct => DomainSpec::Ball,
        FamilyKind::Ensemble => DomainSpec::HalfLine,
    };
    let prior = normalize_prior(&field(kind, n)?, domain)?;
    let mut out = format!("normalization = {}\n", format_value(prior.normalization()));
    if !normalizer_only {
        if let Some(at) = at {
            let d = prior.density(&point(kind, at)?)?;
            writeln!(out, "density = {}", format_value(d))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(out: &str, key: &str) -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap()
            .parse()
            .unwrap()
    }

    #[test]
    fn metric_output() {
        let out = cmd_metric(FamilyKind::Real, None, &[0.5, 1.0]).unwrap();
        assert!((value(&out, "g_rr") - 1.0 / 3.0).abs() < 1e-12);
        assert!((value(&out, "g_thetatheta") - 0.0625).abs() < 1e-12);
        let out = cmd_metric(FamilyKind::Ensemble, Some(2), &[1.0]).unwrap();
        assert!((value(&out, "g_betabeta") - 0.01).abs() < 1e-15);
        assert!(cmd_metric(FamilyKind::Real, Some(3), &[0.5, 1.0]).is_err());
        assert!(cmd_metric(FamilyKind::RealProduct, None, &[0.5, 1.0]).is_err());
        assert!(cmd_metric(FamilyKind::Complex, None, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn distance_output() {
        assert_eq!(value(&cmd_distance(100, 1.0, 1.0, false).unwrap(), "d_bures"), 0.0);
        let out = cmd_distance(2, 1.0, 3.0, true).unwrap();
        let want = (2.0 - (3.0f64 / 45.0).sqrt() - 3.0 * (15.0f64 / 45.0).sqrt()).sqrt();
        assert!((value(&out, "d_bures") - want).abs() < 1e-12);
        assert!(value(&out, "difference") < 1e-8);
        assert!(cmd_distance(6, 1.0, 2.0, true).is_err());
        assert!(cmd_distance(2, 0.0, 2.0, false).is_err());
    }

    #[test]
    fn curvature_and_prior_output() {
        let out = cmd_curvature(FamilyKind::RealProduct, Some(2), &[0.4, 1.0]).unwrap();
        assert!((value(&out, "gaussian_curvature") - 2.0).abs() < 1e-5);
        assert!(cmd_curvature(FamilyKind::Ensemble, Some(2), &[1.0]).is_err());
        let out = cmd_prior(FamilyKind::Ensemble, Some(3), true, None).unwrap();
        assert!((value(&out, "normalization") - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }
}
