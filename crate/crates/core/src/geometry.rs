//! Curvature, volume elements, priors and path lengths for metric fields.
//!
//! Metric fields are callables; every derivative is a central finite
//! difference at steps `h` and `h/2`, Richardson-extrapolated.
//!
//! Scalar curvature follows the sign convention in which a round sphere has
//! *negative* scalar curvature, so that in two dimensions the Gaussian
//! curvature is `K = −R/2`.

use std::fmt;
use std::sync::Arc;

use crate::bures::{bures_distance_commuting, metric_at, spectral_metric, MetricTensor};
use crate::ensemble::{check_beta, reference_g_bb, EnsembleSpec};
use crate::error::{Error, Result};
use crate::families::{ChartPoint, ComplexQubit, ParamFamily, Product, RealQubit};
use crate::quadrature::{Adaptive, GaussLegendre};
use crate::scalar::{lit, to_f64, Scalar};

/// Relative finite-difference step for curvature derivatives. Curvature needs
/// second derivatives, and at `1e-4` the rounding noise of numerically
/// computed metrics (~1e-13) already dominates the Richardson-corrected
/// truncation error; `1e-3` balances the two at ~1e-8.
pub const CURVATURE_STEP: f64 = 1e-3;
/// Curvature is only evaluated for `r` in `[MARGIN, 1 − MARGIN]` and, on
/// spherical charts, `θ` at least `MARGIN` away from the poles.
pub const INTERIOR_MARGIN: f64 = 0.05;
/// Largest tolerated `|g₁₂|` for the orthogonal-coordinate curvature formula.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Lengths may fall below distances by at most this much before it counts as
/// an invariant violation.
pub const EXCESS_TOL: f64 = 1e-9;

type MetricFn<T> = dyn Fn(&ChartPoint<T>) -> Result<MetricTensor<T>> + Send + Sync;

/// Coordinate layout of a metric field, used for interior checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// `(r, θ)` on the unit disk.
    Polar,
    /// `(r, θ, φ)` on the unit ball.
    Spherical,
    /// `β` on `(0, ∞)`.
    HalfLine,
    /// No coordinate restrictions.
    Unrestricted,
}

/// A metric as a function of chart coordinates.
#[derive(Clone)]
pub struct MetricField<T: Scalar> {
    dim: usize,
    kind: ChartKind,
    label: String,
    eval: Arc<MetricFn<T>>,
}

impl<T: Scalar> fmt::Debug for MetricField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

impl<T: Scalar> MetricField<T> {
    pub fn new(
        dim: usize,
        kind: ChartKind,
        label: impl Into<String>,
        eval: impl Fn(&ChartPoint<T>) -> Result<MetricTensor<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            kind,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// Bures metric of a family, computed numerically at every call.
    pub fn from_family(family: Arc<dyn ParamFamily<T>>, kind: ChartKind) -> Self {
        let dim = family.n_params();
        let label = family.label();
        Self::new(dim, kind, label, move |p| metric_at(family.as_ref(), p))
    }

    /// Numerical Bures field of the `n`-fold real product family.
    pub fn real_product(n: usize) -> Result<Self> {
        let fam: Arc<dyn ParamFamily<T>> = if n == 1 {
            Arc::new(RealQubit)
        } else {
            Arc::new(Product::real(n)?)
        };
        Ok(Self::from_family(fam, ChartKind::Polar))
    }

    /// Numerical Bures field of the `n`-fold complex product family.
    pub fn complex_product(n: usize) -> Result<Self> {
        let fam: Arc<dyn ParamFamily<T>> = if n == 1 {
            Arc::new(ComplexQubit)
        } else {
            Arc::new(Product::complex(n)?)
        };
        Ok(Self::from_family(fam, ChartKind::Spherical))
    }

    /// One-dimensional `g_ββ` field of the `n`-qubit ensemble, see
    /// [`ensemble_g_bb`].
    pub fn ensemble(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("ensemble needs n >= 1".into()));
        }
        Ok(Self::new(1, ChartKind::HalfLine, format!("ensemble n={n}"), move |p| {
            let beta = p.get(0);
            Ok(MetricTensor::diagonal(&[ensemble_g_bb(n, beta)?]))
        }))
    }

    /// `diag(1, r²)`: the Euclidean plane in polar coordinates.
    pub fn flat_polar() -> Self {
        Self::new(2, ChartKind::Polar, "flat polar", |p| {
            let r = p.get(0);
            Ok(MetricTensor::diagonal(&[T::one(), r * r]))
        })
    }

    /// `diag(1, r², r² sin²θ)`: Euclidean space in spherical coordinates.
    pub fn flat_spherical() -> Self {
        Self::new(3, ChartKind::Spherical, "flat spherical", |p| {
            let (r, s) = (p.get(0), p.get(1).sin());
            Ok(MetricTensor::diagonal(&[T::one(), r * r, r * r * s * s]))
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, point: &ChartPoint<T>) -> Result<MetricTensor<T>> {
        if point.len() != self.dim {
            return Err(Error::Shape(format!(
                "{}-dimensional field evaluated at a {}-coordinate point",
                self.dim,
                point.len()
            )));
        }
        (self.eval)(point)
    }

    /// Rejects points inside the curvature margin near coordinate
    /// singularities.
    fn check_curvature_interior(&self, point: &ChartPoint<T>) -> Result<()> {
        let margin = lit::<T>(INTERIOR_MARGIN);
        let radial = |r: T| -> Result<()> {
            if r < margin || r > T::one() - margin {
                return Err(Error::Boundary(format!(
                    "r = {} outside the curvature interior [{INTERIOR_MARGIN}, {}]",
                    to_f64(r),
                    1.0 - INTERIOR_MARGIN
                )));
            }
            Ok(())
        };
        match self.kind {
            ChartKind::Polar => radial(point.get(0)),
            ChartKind::Spherical => {
                radial(point.get(0))?;
                let two_pi = T::PI() + T::PI();
                let theta = point.get(1) - two_pi * (point.get(1) / two_pi).floor();
                if theta < margin || theta > T::PI() - margin {
                    return Err(Error::Boundary(format!(
                        "θ = {} within {INTERIOR_MARGIN} of a pole",
                        to_f64(theta)
                    )));
                }
                Ok(())
            }
            ChartKind::HalfLine => {
                if point.get(0) <= T::zero() {
                    return Err(Error::Boundary("β must be positive".into()));
                }
                Ok(())
            }
            ChartKind::Unrestricted => Ok(()),
        }
    }
}

/// `g_ββ` of the `n`-qubit ensemble at `β`: the closed form for
/// `2 ≤ n ≤ 7`, [`spectral_metric`] otherwise.
pub fn ensemble_g_bb<T: Scalar>(n: usize, beta: T) -> Result<T> {
    check_beta(beta)?;
    if (2..=7).contains(&n) {
        reference_g_bb(n, beta)
    } else {
        spectral_metric(&EnsembleSpec::new(n, beta)?)
    }
}

fn step_for<T: Scalar>(x: T, rel: T) -> T {
    rel * x.abs().max(T::one())
}

fn richardson<T: Scalar>(coarse: T, fine: T) -> T {
    (lit::<T>(4.0) * fine - coarse) / lit(3.0)
}

/// Central derivative of a scalar function along `axis`, Richardson at
/// `h, h/2`.
fn derivative<T: Scalar>(
    f: &dyn Fn(&ChartPoint<T>) -> Result<T>,
    point: &ChartPoint<T>,
    axis: usize,
    h: T,
) -> Result<T> {
    let central = |h: T| -> Result<T> {
        Ok((f(&point.shifted(axis, h))? - f(&point.shifted(axis, -h))?) / (h + h))
    };
    Ok(richardson(central(h)?, central(h * lit(0.5))?))
}

/// Gaussian curvature of a 2D metric in orthogonal coordinates `(u, v)`:
/// `K = −1/(2√(EG)) [∂_v(∂_v E / √(EG)) + ∂_u(∂_u G / √(EG))]`,
/// with `E = g_uu`, `G = g_vv`.
pub fn gaussian_curvature_2d<T: Scalar>(field: &MetricField<T>, point: &ChartPoint<T>) -> Result<T> {
    gaussian_curvature_2d_with_step(field, point, lit(CURVATURE_STEP))
}

pub fn gaussian_curvature_2d_with_step<T: Scalar>(
    field: &MetricField<T>,
    point: &ChartPoint<T>,
    rel_step: T,
) -> Result<T> {
    if field.dim() != 2 {
        return Err(Error::Precondition(format!(
            "Gaussian curvature needs a 2D metric, got {}D",
            field.dim()
        )));
    }
    field.check_curvature_interior(point)?;
    let g = field.eval(point)?;
    if g.get(0, 1).abs() > lit(ORTHOGONALITY_TOL) {
        return Err(Error::Precondition(format!(
            "coordinates are not orthogonal: g_12 = {:e}",
            to_f64(g.get(0, 1))
        )));
    }
    let hu = step_for(point.get(0), rel_step);
    let hv = step_for(point.get(1), rel_step);

    let e = |p: &ChartPoint<T>| -> Result<T> { Ok(field.eval(p)?.get(0, 0)) };
    let gg = |p: &ChartPoint<T>| -> Result<T> { Ok(field.eval(p)?.get(1, 1)) };
    let w = |p: &ChartPoint<T>| -> Result<T> {
        let m = field.eval(p)?;
        Ok((m.get(0, 0) * m.get(1, 1)).sqrt())
    };
    let inner_v = |p: &ChartPoint<T>| -> Result<T> { Ok(derivative(&e, p, 1, hv)? / w(p)?) };
    let inner_u = |p: &ChartPoint<T>| -> Result<T> { Ok(derivative(&gg, p, 0, hu)? / w(p)?) };
    let outer = derivative(&inner_v, point, 1, hv)? + derivative(&inner_u, point, 0, hu)?;
    Ok(-outer / (lit::<T>(2.0) * w(point)?))
}

/// Metric, first and second coordinate derivatives at a point.
struct Jet<T> {
    dim: usize,
    g: Vec<T>,
    /// `dg[m][a*d+b] = ∂_m g_ab`
    dg: Vec<Vec<T>>,
    /// `ddg[m*d+n][a*d+b] = ∂_m ∂_n g_ab`
    ddg: Vec<Vec<T>>,
}

fn jet<T: Scalar>(field: &MetricField<T>, point: &ChartPoint<T>, rel_step: T) -> Result<Jet<T>> {
    let d = field.dim();
    let comps = |p: &ChartPoint<T>| -> Result<Vec<T>> { Ok(field.eval(p)?.components().to_vec()) };
    let g0 = comps(point)?;
    let steps: Vec<T> = (0..d).map(|m| step_for(point.get(m), rel_step)).collect();
    let combine = |coarse: Vec<T>, fine: Vec<T>| -> Vec<T> {
        coarse
            .into_iter()
            .zip(fine)
            .map(|(c, f)| richardson(c, f))
            .collect()
    };

    let first = |m: usize, h: T| -> Result<Vec<T>> {
        let plus = comps(&point.shifted(m, h))?;
        let minus = comps(&point.shifted(m, -h))?;
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(&a, &b)| (a - b) / (h + h))
            .collect())
    };
    let second = |m: usize, n: usize, hm: T, hn: T| -> Result<Vec<T>> {
        if m == n {
            let plus = comps(&point.shifted(m, hm))?;
            let minus = comps(&point.shifted(m, -hm))?;
            Ok((0..g0.len())
                .map(|k| (plus[k] - lit::<T>(2.0) * g0[k] + minus[k]) / (hm * hm))
                .collect())
        } else {
            let pp = comps(&point.shifted(m, hm).shifted(n, hn))?;
            let pm = comps(&point.shifted(m, hm).shifted(n, -hn))?;
            let mp = comps(&point.shifted(m, -hm).shifted(n, hn))?;
            let mm = comps(&point.shifted(m, -hm).shifted(n, -hn))?;
            let denom = lit::<T>(4.0) * hm * hn;
            Ok((0..g0.len())
                .map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / denom)
                .collect())
        }
    };

    let half = lit::<T>(0.5);
    let mut dg = Vec::with_capacity(d);
    for m in 0..d {
        dg.push(combine(first(m, steps[m])?, first(m, steps[m] * half)?));
    }
    let mut ddg = vec![Vec::new(); d * d];
    for m in 0..d {
        for n in m..d {
            let v = combine(
                second(m, n, steps[m], steps[n])?,
                second(m, n, steps[m] * half, steps[n] * half)?,
            );
            ddg[n * d + m] = v.clone();
            ddg[m * d + n] = v;
        }
    }
    Ok(Jet { dim: d, g: g0, dg, ddg })
}

fn invert<T: Scalar>(d: usize, g: &[T]) -> Result<Vec<T>> {
    let mut a = g.to_vec();
    let mut inv = vec![T::zero(); d * d];
    for i in 0..d {
        inv[i * d + i] = T::one();
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| {
                a[i * d + col]
                    .abs()
                    .partial_cmp(&a[j * d + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        let p = a[pivot * d + col];
        if p == T::zero() || !p.is_finite() {
            return Err(Error::Accuracy("metric is singular".into()));
        }
        for k in 0..d {
            a.swap(pivot * d + k, col * d + k);
            inv.swap(pivot * d + k, col * d + k);
        }
        for k in 0..d {
            a[col * d + k] /= p;
            inv[col * d + k] /= p;
        }
        for row in 0..d {
            if row != col {
                let f = a[row * d + col];
                for k in 0..d {
                    let av = a[col * d + k];
                    let iv = inv[col * d + k];
                    a[row * d + k] -= f * av;
                    inv[row * d + k] -= f * iv;
                }
            }
        }
    }
    Ok(inv)
}

/// Ricci scalar from Christoffel symbols, for a metric of any dimension.
/// Sign convention: spheres are negative (see module docs).
pub fn scalar_curvature<T: Scalar>(field: &MetricField<T>, point: &ChartPoint<T>) -> Result<T> {
    scalar_curvature_with_step(field, point, lit(CURVATURE_STEP))
}

pub fn scalar_curvature_with_step<T: Scalar>(
    field: &MetricField<T>,
    point: &ChartPoint<T>,
    rel_step: T,
) -> Result<T> {
    field.check_curvature_interior(point)?;
    let jet = jet(field, point, rel_step)?;
    Ok(-ricci_scalar_standard(&jet)?)
}

/// `R = g^{ij} R_ij` with `R_ij = ∂_k Γ^k_ij − ∂_j Γ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik`
/// (round spheres positive).
fn ricci_scalar_standard<T: Scalar>(jet: &Jet<T>) -> Result<T> {
    let d = jet.dim;
    let gi = invert(d, &jet.g)?;
    let idx = |a: usize, b: usize| a * d + b;
    let half = lit::<T>(0.5);

    // S[l][i][j] = ∂_i g_lj + ∂_j g_li − ∂_l g_ij
    let s = |l: usize, i: usize, j: usize| -> T {
        jet.dg[i][idx(l, j)] + jet.dg[j][idx(l, i)] - jet.dg[l][idx(i, j)]
    };
    // ∂_m S[l][i][j]
    let ds = |m: usize, l: usize, i: usize, j: usize| -> T {
        jet.ddg[idx(m, i)][idx(l, j)] + jet.ddg[idx(m, j)][idx(l, i)] - jet.ddg[idx(m, l)][idx(i, j)]
    };
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let dgi = |m: usize, k: usize, l: usize| -> T {
        let mut acc = T::zero();
        for a in 0..d {
            for b in 0..d {
                acc += gi[idx(k, a)] * jet.dg[m][idx(a, b)] * gi[idx(b, l)];
            }
        }
        -acc
    };

    let mut gamma = vec![T::zero(); d * d * d];
    let gidx = |k: usize, i: usize, j: usize| (k * d + i) * d + j;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = T::zero();
                for l in 0..d {
                    acc += gi[idx(k, l)] * s(l, i, j);
                }
                gamma[gidx(k, i, j)] = half * acc;
            }
        }
    }
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let mut dgamma = vec![T::zero(); d * d * d * d];
    let didx = |m: usize, k: usize, i: usize, j: usize| ((m * d + k) * d + i) * d + j;
    for m in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = T::zero();
                    for l in 0..d {
                        acc += dgi(m, k, l) * s(l, i, j) + gi[idx(k, l)] * ds(m, l, i, j);
                    }
                    dgamma[didx(m, k, i, j)] = half * acc;
                }
            }
        }
    }

    let mut scalar = T::zero();
    for i in 0..d {
        for j in 0..d {
            let mut ricci = T::zero();
            for k in 0..d {
                ricci += dgamma[didx(k, k, i, j)] - dgamma[didx(j, k, i, k)];
                for l in 0..d {
                    ricci += gamma[gidx(k, k, l)] * gamma[gidx(l, i, j)]
                        - gamma[gidx(k, j, l)] * gamma[gidx(l, i, k)];
                }
            }
            scalar += gi[idx(i, j)] * ricci;
        }
    }
    Ok(scalar)
}

/// Scalar curvature of a diagonal three-parameter metric.
pub fn scalar_curvature_diag3<T: Scalar>(field: &MetricField<T>, point: &ChartPoint<T>) -> Result<T> {
    if field.dim() != 3 {
        return Err(Error::Precondition(format!(
            "expected a 3-parameter metric, got {}",
            field.dim()
        )));
    }
    let g = field.eval(point)?;
    if !g.is_diagonal(lit(ORTHOGONALITY_TOL)) {
        return Err(Error::Precondition("metric is not diagonal".into()));
    }
    scalar_curvature(field, point)
}

/// `√det g`.
pub fn volume_element<T: Scalar>(field: &MetricField<T>, point: &ChartPoint<T>) -> Result<T> {
    let g = field.eval(point)?;
    let det = g.determinant();
    let scale = g.components().iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    let floor = -lit::<T>(1e-14) * scale.powi(field.dim() as i32).max(T::min_positive_value());
    if det < floor || det.is_nan() {
        return Err(Error::Accuracy(format!(
            "metric determinant {:e} is negative",
            to_f64(det)
        )));
    }
    Ok(det.max(T::zero()).sqrt())
}

/// Integration domain for a prior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainSpec {
    /// `0 ≤ r ≤ 1`, `0 ≤ θ < 2π`.
    Disk,
    /// `0 ≤ r ≤ 1`, `0 ≤ θ < π`, `0 ≤ φ < 2π`.
    Ball,
    /// `0 < β < ∞`.
    HalfLine,
}

impl DomainSpec {
    pub fn dim(self) -> usize {
        match self {
            DomainSpec::Disk => 2,
            DomainSpec::Ball => 3,
            DomainSpec::HalfLine => 1,
        }
    }
}

/// Normalized volume element.
#[derive(Clone, Debug)]
pub struct PriorDensity<T: Scalar> {
    domain: DomainSpec,
    field: MetricField<T>,
    normalization: T,
}

impl<T: Scalar> PriorDensity<T> {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    /// `∫ √det g` over the domain.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    pub fn density(&self, point: &ChartPoint<T>) -> Result<T> {
        Ok(volume_element(&self.field, point)? / self.normalization)
    }

    /// Integral of the density over its domain, by the same rules used for
    /// normalization but at the given order (ignored on the half-line, which
    /// is integrated adaptively).
    pub fn total_mass(&self, order: usize) -> Result<T> {
        let field = &self.field;
        let vol = |p: &ChartPoint<T>| volume_element(field, p);
        Ok(integrate_domain(self.domain, &vol, order)? / self.normalization)
    }
}

const PRIOR_START_ORDER: usize = 16;
const PRIOR_MAX_ORDER: usize = 64;
const PRIOR_REL_TOL: f64 = 1e-12;
const HALF_LINE_TOL: f64 = 1e-11;

/// Normalizes the volume element of `field` over `domain` into a prior.
///
/// Disk and ball use `r = sin ψ` (absorbing the `1/√(1−r²)` edge behaviour
/// of Bures volume elements) and tensor Gauss–Legendre rules whose order
/// doubles from 16 to 64; the half-line is split at `β = 1` and integrated
/// adaptively in `√β` and `1/√β`.
pub fn normalize_prior<T: Scalar>(field: &MetricField<T>, domain: DomainSpec) -> Result<PriorDensity<T>> {
    if field.dim() != domain.dim() {
        return Err(Error::Shape(format!(
            "{}D field over a {}D domain",
            field.dim(),
            domain.dim()
        )));
    }
    let vol = |p: &ChartPoint<T>| volume_element(field, p);
    let normalization = match domain {
        DomainSpec::HalfLine => integrate_half_line(&vol)?,
        _ => {
            let mut order = PRIOR_START_ORDER;
            let mut prev = integrate_domain(domain, &vol, order)?;
            loop {
                order *= 2;
                let next = integrate_domain(domain, &vol, order)?;
                if (next - prev).abs() <= lit::<T>(PRIOR_REL_TOL) * next.abs() {
                    break next;
                }
                if order >= PRIOR_MAX_ORDER {
                    return Err(Error::Integrability(format!(
                        "volume element of {} not integrable to {PRIOR_REL_TOL:e} over {domain:?} (last change {:e})",
                        field.label(),
                        to_f64((next - prev).abs())
                    )));
                }
                prev = next;
            }
        }
    };
    if !(normalization > T::zero()) || !normalization.is_finite() {
        return Err(Error::Integrability(format!(
            "normalization constant {} is not a positive number",
            to_f64(normalization)
        )));
    }
    Ok(PriorDensity {
        domain,
        field: field.clone(),
        normalization,
    })
}

fn integrate_domain<T: Scalar>(
    domain: DomainSpec,
    f: &dyn Fn(&ChartPoint<T>) -> Result<T>,
    order: usize,
) -> Result<T> {
    if domain == DomainSpec::HalfLine {
        return integrate_half_line(f);
    }
    if order == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    let rule = GaussLegendre::<T>::new(order);
    let two_pi = T::PI() + T::PI();
    let radial: Vec<(T, T)> = rule
        .mapped(T::zero(), T::FRAC_PI_2())
        .map(|(psi, w)| (psi.sin(), w * psi.cos()))
        .collect();
    match domain {
        DomainSpec::Disk => {
            let mut acc = T::zero();
            for &(r, wr) in &radial {
                for (theta, wt) in rule.mapped(T::zero(), two_pi) {
                    acc += wr * wt * f(&ChartPoint::polar(r, theta))?;
                }
            }
            Ok(acc)
        }
        DomainSpec::Ball => {
            let mut acc = T::zero();
            for &(r, wr) in &radial {
                for (theta, wt) in rule.mapped(T::zero(), T::PI()) {
                    for (phi, wp) in rule.mapped(T::zero(), two_pi) {
                        acc += wr * wt * wp * f(&ChartPoint::spherical(r, theta, phi))?;
                    }
                }
            }
            Ok(acc)
        }
        DomainSpec::HalfLine => unreachable!(),
    }
}

/// `∫₀^∞ f(β) dβ`, split at `β = 1`: `β = x²` on the inner part absorbs a
/// `β^{-1/2}` edge, `β = 1/u²` maps the tail onto `(0, 1]`.
fn integrate_half_line<T: Scalar>(f: &dyn Fn(&ChartPoint<T>) -> Result<T>) -> Result<T> {
    let quad = Adaptive::new(10, lit::<T>(HALF_LINE_TOL)).with_max_depth(60);
    let two = lit::<T>(2.0);
    let mut failure = None;
    let mut eval = |beta: T, jac: T| -> T {
        if jac == T::zero() {
            return T::zero();
        }
        match f(&ChartPoint::new(vec![beta])) {
            Ok(v) => v * jac,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    };
    let inner = quad.integrate(T::zero(), T::one(), |x| eval(x * x, two * x))?;
    let outer = quad.integrate(T::zero(), T::one(), |u| {
        if u == T::zero() {
            return T::zero();
        }
        eval(T::one() / (u * u), two / (u * u * u))
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(inner + outer),
    }
}

/// `∫₀^∞ √g_ββ dβ` for the `n`-qubit ensemble, `2 ≤ n ≤ 7`.
pub fn length_normalizer<T: Scalar>(n: usize) -> Result<T> {
    if !(2..=7).contains(&n) {
        return Err(Error::Domain(format!(
            "length normalizers are defined for 2 ≤ n ≤ 7, got {n}"
        )));
    }
    integrate_half_line(&|p: &ChartPoint<T>| Ok(reference_g_bb(n, p.get(0))?.sqrt()))
}

/// Normalizers for `n = 2, …, 7`, in order.
pub fn length_normalizers<T: Scalar>() -> Result<Vec<T>> {
    (2..=7).map(length_normalizer).collect()
}

/// `|∫_{β₁}^{β₂} √g_ββ dβ|`, integrated in `x = √β`.
pub fn integrated_length<T: Scalar>(n: usize, beta1: T, beta2: T) -> Result<T> {
    check_beta(beta1)?;
    check_beta(beta2)?;
    if n == 0 {
        return Err(Error::Domain("ensemble needs n >= 1".into()));
    }
    if beta1 == beta2 {
        return Ok(T::zero());
    }
    let (lo, hi) = if beta1 < beta2 { (beta1, beta2) } else { (beta2, beta1) };
    let quad = Adaptive::new(10, lit::<T>(1e-12)).with_max_depth(60);
    let mut failure = None;
    let value = quad.integrate(lo.sqrt(), hi.sqrt(), |x| {
        match ensemble_g_bb(n, x * x) {
            Ok(g) => g.sqrt() * (x + x),
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Integrated length along `β` minus the Bures distance between the
/// endpoints. Negative values beyond rounding are impossible for a length
/// metric and are reported as an invariant violation.
pub fn length_distance_excess<T: Scalar>(n: usize, beta1: T, beta2: T) -> Result<T> {
    let length = integrated_length(n, beta1, beta2)?;
    let dist = bures_distance_commuting(&EnsembleSpec::new(n, beta1)?, &EnsembleSpec::new(n, beta2)?)?;
    let excess = length - dist.value();
    if excess < -lit::<T>(EXCESS_TOL) {
        return Err(Error::InvariantViolation(format!(
            "path length {} below distance {} for n = {n}, β = ({}, {})",
            to_f64(length),
            to_f64(dist.value()),
            to_f64(beta1),
            to_f64(beta2)
        )));
    }
    Ok(excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_fields_have_zero_curvature() {
        let k = gaussian_curvature_2d(&MetricField::<f64>::flat_polar(), &ChartPoint::polar(0.4, 1.2)).unwrap();
        assert_abs_diff_eq!(k, 0.0, epsilon = 1e-6);
        let r = scalar_curvature_diag3(
            &MetricField::<f64>::flat_spherical(),
            &ChartPoint::spherical(0.6, 1.1, 0.3),
        )
        .unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-5);
    }

    #[test]
    fn curvature_rejects_bad_input() {
        let skew = MetricField::<f64>::new(2, ChartKind::Polar, "skew", |_| {
            MetricTensor::new(2, vec![1.0, 0.3, 0.3, 1.0])
        });
        assert!(matches!(
            gaussian_curvature_2d(&skew, &ChartPoint::polar(0.5, 0.5)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            gaussian_curvature_2d(&MetricField::flat_polar(), &ChartPoint::polar(0.97, 0.5)),
            Err(Error::Boundary(_))
        ));
        assert!(matches!(
            scalar_curvature_diag3(&MetricField::<f64>::flat_polar(), &ChartPoint::polar(0.5, 0.5)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            scalar_curvature(&MetricField::<f64>::flat_spherical(), &ChartPoint::spherical(0.5, 0.01, 0.0)),
            Err(Error::Boundary(_))
        ));
    }

    #[test]
    fn volume_elements() {
        let real = MetricField::<f64>::real_product(1).unwrap();
        for r in [0.1, 0.5, 0.9] {
            let v = volume_element(&real, &ChartPoint::polar(r, 0.7)).unwrap();
            assert_abs_diff_eq!(v, r / (4.0 * (1.0 - r * r).sqrt()), epsilon = 1e-14);
        }
        assert_eq!(volume_element(&MetricField::<f64>::flat_polar(), &ChartPoint::polar(0.0, 1.0)).unwrap(), 0.0);
        let complex = MetricField::<f64>::complex_product(1).unwrap();
        let (r, t) = (0.6, 1.2);
        let v = volume_element(&complex, &ChartPoint::spherical(r, t, 2.0)).unwrap();
        assert_abs_diff_eq!(v, r * r * t.sin() / (8.0 * (1.0 - r * r).sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn real_prior_matches_closed_form() {
        let prior = normalize_prior(&MetricField::<f64>::real_product(1).unwrap(), DomainSpec::Disk).unwrap();
        assert_abs_diff_eq!(prior.normalization(), PI / 2.0, epsilon = 1e-10);
        for &(r, t) in &[(0.2, 0.1), (0.5, 3.0), (0.93, 5.5)] {
            let p = prior.density(&ChartPoint::polar(r, t)).unwrap();
            assert_abs_diff_eq!(p, r / (2.0 * PI * (1.0 - r * r).sqrt()), epsilon = 1e-8);
        }
    }

    #[test]
    fn two_qubit_length_normalizer() {
        let c: f64 = length_normalizer(2).unwrap();
        assert_abs_diff_eq!(c, PI / 6.0, epsilon = 1e-9);
        assert!(matches!(length_normalizer::<f64>(8), Err(Error::Domain(_))));
    }

    #[test]
    fn integrated_length_arctan_form() {
        let f = |b: f64| (b.sqrt() / (3f64.sqrt() * (b + 2.0).sqrt())).atan();
        let got = integrated_length(2, 1.0, 4.0).unwrap();
        assert_abs_diff_eq!(got, f(4.0) - f(1.0), epsilon = 1e-10);
        assert_eq!(integrated_length(3, 2.0, 2.0).unwrap(), 0.0);
        assert!(matches!(integrated_length(3, 0.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn excess_zero_on_diagonal() {
        assert_eq!(length_distance_excess(2, 1.5, 1.5).unwrap(), 0.0);
        assert!(length_distance_excess(2, 1.0, 3.0).unwrap() >= 0.0);
    }

    #[test]
    fn real_product_gaussian_curvature() {
        let one = MetricField::<f64>::real_product(1).unwrap();
        let k = gaussian_curvature_2d(&one, &ChartPoint::polar(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(k, 4.0, epsilon = 1e-6);
        let three = MetricField::<f64>::real_product(3).unwrap();
        let k = gaussian_curvature_2d(&three, &ChartPoint::polar(0.3, 2.0)).unwrap();
        assert_abs_diff_eq!(k, 4.0 / 3.0, epsilon = 1e-6);
        let r = scalar_curvature(&one, &ChartPoint::polar(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(r, -8.0, epsilon = 1e-5);
    }

    #[test]
    fn complex_qubit_scalar_curvature() {
        let field = MetricField::<f64>::complex_product(1).unwrap();
        let r = scalar_curvature_diag3(&field, &ChartPoint::spherical(0.5, PI / 3.0, 1.0)).unwrap();
        assert_abs_diff_eq!(r, -24.0, epsilon = 1e-4);
    }
}
