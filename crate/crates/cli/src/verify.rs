//! The acceptance suite: eleven criteria, each a list of measured checks.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::Result;
use bures_core::bures::*;
use bures_core::ensemble::*;
use bures_core::families::{ChartPoint, ComplexQubit, Conjugated, ParamFamily, Product, RealQubit};
use bures_core::geometry::*;
use bures_core::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::figure::{self, Figure};

/// One measured quantity against its tolerance.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            note: None,
        }
    }

    pub fn errored(name: impl Into<String>, err: &anyhow::Error) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            note: Some(format!("{err:#}")),
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "ok  " } else { "FAIL" };
        match &self.note {
            Some(note) => format!("{verdict} {}: {note}", self.name),
            None => format!(
                "{verdict} {}: measured {:.3e}, tolerance {:.3e}",
                self.name, self.measured, self.tolerance
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub number: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One-line verdict naming the failing checks, if any.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{verdict} criterion {:>2} [{}] {}/{} checks passed ({:.1} s)",
            self.number,
            self.title,
            self.checks.len() - failed.len(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        );
        if !failed.is_empty() {
            line.push_str(&format!("; failing: {}", failed.join("; ")));
        }
        line
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "real-family metric closed forms"),
    (2, "Gaussian curvature 4/n"),
    (3, "complex qubit metric and curvature"),
    (4, "ensemble eigen-oracle"),
    (5, "g_ββ closed forms"),
    (6, "closed-form distances"),
    (7, "n=100 distance surface"),
    (8, "length normalizers"),
    (9, "priors"),
    (10, "length vs distance"),
    (11, "property suite"),
];

/// Runs one criterion; `tol_scale` multiplies every numerical tolerance
/// (runtime limits and counts are not scaled).
pub fn run_criterion(number: u8, tol_scale: f64) -> CriterionReport {
    let (_, title) = CRITERIA
        .iter()
        .copied()
        .find(|(n, _)| *n == number)
        .unwrap_or((number, "unknown"));
    let start = Instant::now();
    let s = tol_scale;
    let result = match number {
        1 => criterion_1(s),
        2 => criterion_2(s),
        3 => criterion_3(s),
        4 => criterion_4(s),
        5 => criterion_5(s),
        6 => criterion_6(s),
        7 => criterion_7(s),
        8 => criterion_8(s),
        9 => criterion_9(s),
        10 => criterion_10(s),
        11 => criterion_11(s),
        _ => Err(anyhow::anyhow!("no criterion {number}")),
    };
    let checks = result.unwrap_or_else(|e| vec![Check::errored("evaluation", &e)]);
    CriterionReport {
        number,
        title,
        checks,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(tol_scale: f64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(n, _)| run_criterion(n, tol_scale)).collect()
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m: f64, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Runs `f`, turning an error into a failed check.
fn guarded(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::errored(name, &e))
}

fn metric_grid() -> Vec<ChartPoint<f64>> {
    let radii = [0.1, 0.275, 0.45, 0.625, 0.8];
    let angles = figure::linspace(0.3, 5.5, 5);
    radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&t| ChartPoint::polar(r, t)))
        .collect()
}

fn curvature_grid() -> Vec<ChartPoint<f64>> {
    let radii = figure::linspace(0.1, 0.8, 7);
    let angles = figure::linspace(0.3, 5.9, 7);
    radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&t| ChartPoint::polar(r, t)))
        .collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_ball_points(seed: u64, count: usize) -> Vec<ChartPoint<f64>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            ChartPoint::spherical(
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.2..PI - 0.2),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect()
}

fn ginibre(rng: &mut impl Rng, dim: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_density(rng: &mut impl Rng, dim: usize) -> Result<DensityMatrix<f64>> {
    let g = ginibre(rng, dim);
    let gg = HermitianMatrix::hermitian_part(&g.matmul(&g.adjoint())?);
    let t = gg.trace();
    Ok(DensityMatrix::new(gg.scale(1.0 / t))?)
}

fn random_unitary(rng: &mut impl Rng, dim: usize) -> Result<ComplexMatrix<f64>> {
    let h = HermitianMatrix::hermitian_part(&ginibre(rng, dim));
    Ok(h.eigh()?.eigenvectors().clone())
}

fn criterion_1(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut small_runtime = Duration::ZERO;
    let mut large_runtime = Duration::ZERO;
    for n in 1..=7 {
        let tol = if n <= 5 { 1e-8 } else { 1e-7 };
        let start = Instant::now();
        checks.push(guarded(&format!("metric n={n}"), || {
            let fam = Product::<f64>::real(n)?;
            let nf = n as f64;
            let mut worst: f64 = 0.0;
            for p in metric_grid() {
                let r = p.get(0);
                let g = metric_at(&fam, &p)?;
                worst = worst
                    .max((g.get(0, 0) - nf / (4.0 * (1.0 - r * r))).abs())
                    .max(g.get(0, 1).abs())
                    .max((g.get(1, 1) - nf * r * r / 4.0).abs());
            }
            Ok(Check::at_most(format!("metric n={n} (5x5 grid, abs)"), worst, tol * s))
        }));
        if n <= 5 {
            small_runtime += start.elapsed();
        } else {
            large_runtime += start.elapsed();
        }
    }
    checks.push(Check::at_most("runtime n=1..5 [s]", small_runtime.as_secs_f64(), 30.0));
    checks.push(Check::at_most("runtime n=6,7 [s]", large_runtime.as_secs_f64(), 300.0));
    Ok(checks)
}

fn criterion_2(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=5usize {
        let want = 4.0 / n as f64;
        let ks: Result<Vec<f64>> = (|| {
            let field = MetricField::<f64>::real_product(n)?;
            curvature_grid()
                .iter()
                .map(|p| Ok(gaussian_curvature_2d(&field, p)?))
                .collect()
        })();
        match ks {
            Ok(ks) => {
                let (lo, hi) = ks
                    .iter()
                    .fold((f64::MAX, f64::MIN), |(l, h), &k| (l.min(k), h.max(k)));
                checks.push(Check::at_most(
                    format!("K(n={n}) = {want:.6} ± 1e-5"),
                    max_abs(ks.iter().map(|k| k - want)),
                    1e-5 * s,
                ));
                checks.push(Check::at_most(format!("K(n={n}) spread over 7x7 grid"), hi - lo, 1e-5 * s));
            }
            Err(e) => checks.push(Check::errored(format!("K(n={n})"), &e)),
        }
    }
    Ok(checks)
}

fn criterion_3(s: f64) -> Result<Vec<Check>> {
    let points = random_ball_points(3, 10);
    let mut checks = Vec::new();
    checks.push(guarded("complex qubit metric", || {
        let mut worst: f64 = 0.0;
        for p in &points {
            let (r, t) = (p.get(0), p.get(1));
            let want = MetricTensor::diagonal(&[
                1.0 / (4.0 * (1.0 - r * r)),
                r * r / 4.0,
                r * r * t.sin().powi(2) / 4.0,
            ]);
            worst = worst.max(metric_at(&ComplexQubit, p)?.max_abs_diff(&want));
        }
        Ok(Check::at_most("complex qubit metric (10 points, abs)", worst, 1e-8 * s))
    }));
    checks.push(guarded("scalar curvature complex qubit", || {
        let field = MetricField::<f64>::complex_product(1)?;
        let mut worst: f64 = 0.0;
        for p in &points {
            worst = worst.max((scalar_curvature_diag3(&field, p)? + 24.0).abs());
        }
        Ok(Check::at_most("scalar curvature complex qubit = -24 ± 1e-4", worst, 1e-4 * s))
    }));
    checks.push(guarded("2-fold complex metric", || {
        let two = Product::<f64>::complex(2)?;
        let mut worst: f64 = 0.0;
        for p in &points {
            let single = metric_at(&ComplexQubit, p)?;
            worst = worst.max(metric_at(&two, p)?.max_abs_diff(&single.scale(2.0)));
        }
        Ok(Check::at_most("2-fold complex metric = 2 x single (10 points)", worst, 1e-7 * s))
    }));
    checks.push(guarded("scalar curvature 2-fold complex", || {
        let field = MetricField::<f64>::complex_product(2)?;
        let mut worst: f64 = 0.0;
        for p in &points {
            worst = worst.max((scalar_curvature_diag3(&field, p)? + 12.0).abs());
        }
        Ok(Check::at_most("scalar curvature 2-fold complex = -12 ± 1e-3", worst, 1e-3 * s))
    }));
    Ok(checks)
}

fn criterion_4(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 2..=5 {
        for beta in [0.5, 1.0, 2.0] {
            checks.push(guarded(&format!("spectrum n={n} β={beta}"), || {
                let spec = EnsembleSpec::new(n, beta)?;
                let got = averaged_matrix(&spec)?.eigh()?.eigenvalues().to_vec();
                let want = expanded_spectrum(&spec)?;
                let worst = max_abs(got.iter().zip(&want).map(|(g, w)| g - w));
                let tol = 1e-7 * s;
                let mut miscounted = 0usize;
                for b in eigen_branches(&spec)? {
                    let count = got.iter().filter(|&&l| (l - b.lambda()).abs() <= tol).count();
                    if count as u64 != multiplicity_u64(n, b.q)? {
                        miscounted += 1;
                    }
                }
                let mut c = Check::at_most(format!("spectrum n={n} β={beta}"), worst, tol);
                if miscounted > 0 || got.len() != want.len() {
                    c.passed = false;
                    c.note = Some(format!("{miscounted} branches with wrong multiplicity"));
                }
                Ok(c)
            }));
        }
    }
    checks.push(guarded("trace identity", || {
        let mut worst: f64 = 0.0;
        for n in 1..=200 {
            for beta in [0.1f64, 1.0, 10.0] {
                worst = worst.max((trace_identity(&EnsembleSpec::new(n, beta)?)? - 1.0).abs());
            }
        }
        Ok(Check::at_most("trace identity n<=200", worst, 1e-9 * s))
    }));
    Ok(checks)
}

fn criterion_5(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 2..=7 {
        checks.push(guarded(&format!("g_ββ n={n}"), || {
            let mut worst: f64 = 0.0;
            for beta in [0.5f64, 1.0, 2.0, 5.0] {
                let want = reference_g_bb(n, beta)?;
                let step = default_step(beta).min(beta / 4.0);
                let hs = hs_on_roots_metric(&EnsembleSpec::new(n, beta)?, step)?;
                let md = metric_from_distance(ensemble_distance(n), beta, step)?;
                worst = worst.max(rel(hs, want)).max(rel(md, want));
            }
            Ok(Check::at_most(format!("g_ββ n={n} (spectral and distance routes, rel)"), worst, 1e-5 * s))
        }));
    }
    Ok(checks)
}

/// Squared distance from the two- and three-qubit closed forms.
pub fn closed_form_distance_sq(n: usize, b1: f64, b2: f64) -> Option<f64> {
    let d = (3.0 + 2.0 * b1) * (3.0 + 2.0 * b2);
    match n {
        2 => Some(2.0 - (b1 * b2 / d).sqrt() - 3.0 * ((2.0 + b1) * (2.0 + b2) / d).sqrt()),
        3 => Some(2.0 - 2.0 * (b1 * b2 / d).sqrt() - 2.0 * ((3.0 + b1) * (3.0 + b2) / d).sqrt()),
        _ => None,
    }
}

fn criterion_6(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let betas = [0.05, 0.3, 1.0, 2.0, 3.0, 5.0, 10.0];
    for n in [2, 3] {
        checks.push(guarded(&format!("closed form n={n}"), || {
            let mut worst: f64 = 0.0;
            for &b1 in &betas {
                for &b2 in &betas {
                    let got = bures_distance_commuting(&EnsembleSpec::new(n, b1)?, &EnsembleSpec::new(n, b2)?)?;
                    let want = closed_form_distance_sq(n, b1, b2).unwrap_or(f64::NAN);
                    worst = worst.max((got.squared() - want).abs());
                    // The direct form cancels to ~1e-16 on the diagonal, so
                    // only off-diagonal values are compared unsquared.
                    if b1 != b2 {
                        worst = worst.max((got.value() - want.sqrt()).abs());
                    }
                }
            }
            Ok(Check::at_most(format!("fast path = closed form n={n}"), worst, 1e-10 * s))
        }));
    }
    for n in 2..=5 {
        checks.push(guarded(&format!("dense n={n}"), || {
            let betas = [0.5f64, 1.0, 3.0];
            let dense: Vec<_> = betas
                .iter()
                .map(|&b| Ok((b, averaged_matrix(&EnsembleSpec::new(n, b)?)?)))
                .collect::<Result<_>>()?;
            let mut worst: f64 = 0.0;
            for (b1, r1) in &dense {
                for (b2, r2) in &dense {
                    let fast = bures_distance_commuting(&EnsembleSpec::new(n, *b1)?, &EnsembleSpec::new(n, *b2)?)?;
                    let full = bures_distance(r1, r2)?;
                    worst = worst.max((fast.squared() - full.squared()).abs());
                    if b1 != b2 {
                        worst = worst.max((fast.value() - full.value()).abs());
                    }
                }
            }
            Ok(Check::at_most(format!("fast path = dense n={n}"), worst, 1e-8 * s))
        }));
    }
    Ok(checks)
}

fn criterion_7(s: f64) -> Result<Vec<Check>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("fig2.csv");
    let start = Instant::now();
    let table = figure::cmd_figure(Figure::DistanceSurface, &path, None)?;
    let elapsed = start.elapsed().as_secs_f64();
    let grid = Figure::DistanceSurface.default_grid();
    let d = table.column("d_bures").unwrap_or_default();
    let at = |i: usize, j: usize| d[i * grid + j];
    let mut diag: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for i in 0..grid {
        diag = diag.max(at(i, i).abs());
        for j in 0..grid {
            asym = asym.max((at(i, j) - at(j, i)).abs());
        }
    }
    let out_of_range = d.iter().filter(|&&x| !(0.0..=2f64.sqrt()).contains(&x)).count();
    let first = std::fs::read(&path)?;
    let again = dir.path().join("fig2-again.csv");
    figure::cmd_figure(Figure::DistanceSurface, &again, None)?;
    let identical = first == std::fs::read(&again)?;
    Ok(vec![
        Check::at_most("fig2 100x100 runtime [s]", elapsed, 10.0),
        Check::at_most("fig2 rows", (d.len() as f64 - (grid * grid) as f64).abs(), 0.0),
        Check::at_most("fig2 diagonal", diag, 0.0),
        Check::at_most("fig2 symmetry", asym, 1e-12 * s),
        Check::at_most("fig2 values outside [0, sqrt 2]", out_of_range as f64, 0.0),
        Check::at_most("fig2 byte-identical rerun", if identical { 0.0 } else { 1.0 }, 0.0),
    ])
}

/// Tabulated reference normalizers: `(n, value, tolerance, relative?)`.
pub const TABULATED_NORMALIZERS: [(usize, f64, f64, bool); 6] = [
    (2, PI / 6.0, 1e-6, false),
    (3, PI / 4.0, 1e-6, false),
    (4, 0.987405, 1e-3, true),
    (5, 1.1533, 1e-3, true),
    (6, 1.29428, 1e-3, true),
    (7, 1.42688, 1e-3, true),
];

fn criterion_8(s: f64) -> Result<Vec<Check>> {
    Ok(TABULATED_NORMALIZERS
        .iter()
        .map(|&(n, want, tol, relative)| {
            guarded(&format!("normalizer n={n}"), || {
                let got: f64 = length_normalizer(n)?;
                let err = if relative { rel(got, want) } else { (got - want).abs() };
                let mut c = Check::at_most(
                    format!("normalizer n={n} = {want:.6} ± {tol:e}{}", if relative { " rel" } else { "" }),
                    err,
                    tol * s,
                );
                if !c.passed {
                    c.note = Some(format!("computed {got:.10}, tabulated {want}, error {err:.3e} > {:.0e}", tol * s));
                }
                Ok(c)
            })
        })
        .collect())
}

fn criterion_9(s: f64) -> Result<Vec<Check>> {
    let disk = normalize_prior(&MetricField::<f64>::real_product(1)?, DomainSpec::Disk)?;
    let ball = normalize_prior(&MetricField::<f64>::complex_product(1)?, DomainSpec::Ball)?;
    let line = normalize_prior(&MetricField::<f64>::ensemble(2)?, DomainSpec::HalfLine)?;
    let mut disk_err: f64 = 0.0;
    for p in curvature_grid() {
        let r = p.get(0);
        disk_err = disk_err.max((disk.density(&p)? - r / (2.0 * PI * (1.0 - r * r).sqrt())).abs());
    }
    let mut ball_err: f64 = 0.0;
    for p in random_ball_points(9, 50) {
        let (r, t) = (p.get(0), p.get(1));
        ball_err = ball_err.max((ball.density(&p)? - r * r * t.sin() / (PI * PI * (1.0 - r * r).sqrt())).abs());
    }
    Ok(vec![
        Check::at_most("disk prior pointwise", disk_err, 1e-8 * s),
        Check::at_most("ball prior pointwise", ball_err, 1e-8 * s),
        Check::at_most("disk prior mass", (disk.total_mass(40)? - 1.0).abs(), 1e-6 * s),
        Check::at_most("ball prior mass", (ball.total_mass(24)? - 1.0).abs(), 1e-6 * s),
        Check::at_most("half-line prior n=2 mass", (line.total_mass(0)? - 1.0).abs(), 1e-6 * s),
    ])
}

fn criterion_10(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (fig, n) in [(Figure::ExcessTwo, 2), (Figure::ExcessThree, 3)] {
        checks.push(guarded(&format!("excess n={n}"), || {
            let table = figure::compute(fig, fig.default_grid())?;
            let min = table
                .column("excess")
                .unwrap_or_default()
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok(Check::at_most(format!("excess n={n} >= -1e-9 (100x100 grid)"), (-min).max(0.0), 1e-9 * s))
        }));
    }
    let f2 = |b: f64| (b.sqrt() / (3f64.sqrt() * (b + 2.0).sqrt())).atan();
    let f3 = |b: f64| (b.sqrt() / (b + 3.0).sqrt()).atan();
    let betas = [0.05, 0.3, 1.0, 2.0, 4.0, 10.0, 50.0];
    let forms: [(usize, &dyn Fn(f64) -> f64); 2] = [(2, &f2), (3, &f3)];
    for (n, f) in forms {
        checks.push(guarded(&format!("arctan form n={n}"), || {
            let mut worst: f64 = 0.0;
            for &b1 in &betas {
                for &b2 in &betas {
                    worst = worst.max((integrated_length(n, b1, b2)? - (f(b2) - f(b1)).abs()).abs());
                }
            }
            Ok(Check::at_most(format!("integrated length = arctan form n={n}"), worst, 1e-8 * s))
        }));
    }
    Ok(checks)
}

/// `|d²(x, x+εv)/ε² − g(v,v)|` at `ε = 2e-2` and `1e-2`.
fn third_order_residuals(
    fam: &dyn ParamFamily<f64>,
    p: &ChartPoint<f64>,
    v: &[f64],
) -> Result<(f64, f64, f64)> {
    let rho = fam.density(p)?;
    let q = metric_at(fam, p)?.quadratic_form(v);
    let resid = |eps: f64| -> Result<f64> {
        let dv: Vec<f64> = v.iter().map(|x| x * eps).collect();
        let d2 = bures_distance(&rho, &fam.density(&p.displaced(&dv))?)?.squared();
        Ok((d2 / (eps * eps) - q).abs())
    };
    Ok((q, resid(2e-2)?, resid(1e-2)?))
}

fn third_order_check(name: &str, q: f64, coarse: f64, fine: f64) -> Check {
    // The residual is O(ε): halving ε must at least roughly halve it, unless
    // it is already at rounding level.
    let ratio = if coarse > 1e-7 { fine / coarse } else { 0.0 };
    let mut c = Check::at_most(format!("third-order consistency {name}"), ratio, 0.6);
    if coarse > 0.1 * q {
        c.passed = false;
        c.note = Some(format!("residual {coarse:.3e} not small against g(v,v) = {q:.3e}"));
    }
    c
}

fn criterion_11(s: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cases: Vec<(Arc<dyn ParamFamily<f64>>, ChartPoint<f64>, Vec<f64>)> = vec![
        (Arc::new(RealQubit), ChartPoint::polar(0.5, 1.0), vec![0.6, -0.8]),
        (Arc::new(ComplexQubit), ChartPoint::spherical(0.4, 1.2, 0.7), vec![0.3, 0.5, -0.8]),
        (Arc::new(Product::real(3)?), ChartPoint::polar(0.35, 2.5), vec![1.0, 0.4]),
        (Arc::new(Product::complex(2)?), ChartPoint::spherical(0.6, 2.0, 3.0), vec![-0.2, 0.9, 0.4]),
    ];
    for (fam, p, v) in &cases {
        let label = fam.label();
        checks.push(guarded(&format!("third-order consistency {label}"), || {
            let (q, coarse, fine) = third_order_residuals(fam.as_ref(), p, v)?;
            Ok(third_order_check(&label, q, coarse, fine))
        }));
    }
    for n in [2usize, 5, 100] {
        checks.push(guarded(&format!("third-order consistency ensemble n={n}"), || {
            let beta = 1.5;
            let q = if n <= 7 {
                reference_g_bb(n, beta)?
            } else {
                spectral_metric(&EnsembleSpec::new(n, beta)?)?
            };
            let resid = |eps: f64| -> Result<f64> {
                let d2 = bures_distance_commuting(&EnsembleSpec::new(n, beta)?, &EnsembleSpec::new(n, beta + eps)?)?
                    .squared();
                Ok((d2 / (eps * eps) - q).abs())
            };
            Ok(third_order_check(&format!("ensemble n={n}"), q, resid(2e-2)?, resid(1e-2)?))
        }));
    }
    checks.push(guarded("unitary invariance", || {
        let mut rng = rng(11);
        let mut worst: f64 = 0.0;
        for (fam, p, _) in &cases {
            let u = random_unitary(&mut rng, fam.dim())?;
            let rotated = Conjugated::new(fam.clone(), u)?;
            worst = worst.max(metric_at(fam.as_ref(), p)?.max_abs_diff(&metric_at(&rotated, p)?));
        }
        Ok(Check::at_most("metric invariant under unitary conjugation", worst, 1e-9 * s))
    }));
    checks.push(guarded("triangle inequality", || {
        let mut rng = rng(2024);
        let mut worst = f64::NEG_INFINITY;
        for k in 0..100 {
            let dim = 2 + k % 15;
            let a = random_density(&mut rng, dim)?;
            let b = random_density(&mut rng, dim)?;
            let c = random_density(&mut rng, dim)?;
            let ab = bures_distance(&a, &b)?.value();
            let bc = bures_distance(&b, &c)?.value();
            let ac = bures_distance(&a, &c)?.value();
            worst = worst.max(ac - ab - bc);
        }
        Ok(Check::at_most("triangle inequality, 100 triples (max violation)", worst.max(0.0), 1e-9 * s))
    }));
    Ok(checks)
}
