//! Bures metric and distance.
//!
//! The metric at a chart point is the pullback of
//! `ds² = ½ Σ_{i,j} |⟨i|dρ|j⟩|² / (λ_i + λ_j)` through the chart, polarized
//! to a symmetric bilinear form. Distances use the fidelity form
//! `d² = 2 − 2 tr √(√ρ₁ ρ₂ √ρ₁)`; for commuting ensembles only the shared
//! spectrum is needed.

use crate::ensemble::{check_beta, eigen_branches, log_multiplicity, EnsembleSpec};
use crate::error::{Error, Result};
use crate::families::{ChartPoint, ParamFamily};
use crate::linalg::{sqrtm_psd, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::scalar::{lit, to_f64, Scalar};

/// Smallest eigenvalue a state may have for [`metric_at`] to accept it.
pub const INTERIOR_EIGENVALUE: f64 = 1e-8;
const SMALL_DENOMINATOR: f64 = 1e-12;
const SMALL_NUMERATOR: f64 = 1e-14;

/// Metric components in chart coordinates, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor<T> {
    dim: usize,
    g: Vec<T>,
}

impl<T: Scalar> MetricTensor<T> {
    /// Rejects asymmetric input (tolerance `1e-12`, relative to the largest
    /// component when that exceeds 1).
    pub fn new(dim: usize, g: Vec<T>) -> Result<Self> {
        if g.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} components for a {dim}-dimensional metric",
                g.len()
            )));
        }
        let scale = g.iter().fold(T::one(), |m, &x| m.max(x.abs()));
        for a in 0..dim {
            for b in a + 1..dim {
                let d = (g[a * dim + b] - g[b * dim + a]).abs();
                if d > lit::<T>(1e-12) * scale {
                    return Err(Error::InvariantViolation(format!(
                        "metric asymmetric at ({a}, {b}) by {:e}",
                        to_f64(d)
                    )));
                }
            }
        }
        Ok(Self { dim, g })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let dim = values.len();
        let mut g = vec![T::zero(); dim * dim];
        for (a, &v) in values.iter().enumerate() {
            g[a * dim + a] = v;
        }
        Self { dim, g }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.g[a * self.dim + b]
    }

    pub fn components(&self) -> &[T] {
        &self.g
    }

    /// `δᵀ g δ`.
    pub fn quadratic_form(&self, delta: &[T]) -> T {
        let mut s = T::zero();
        for a in 0..self.dim {
            for b in 0..self.dim {
                s += delta[a] * self.get(a, b) * delta[b];
            }
        }
        s
    }

    pub fn determinant(&self) -> T {
        determinant(self.dim, &self.g)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            g: self.g.iter().map(|&x| x * s).collect(),
        }
    }

    /// Largest absolute component-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.g
            .iter()
            .zip(&other.g)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        (0..self.dim).all(|a| (0..self.dim).all(|b| a == b || self.get(a, b).abs() <= tol))
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Scalar>(dim: usize, g: &[T]) -> T {
    let mut m = g.to_vec();
    let mut det = T::one();
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| {
                m[i * dim + col]
                    .abs()
                    .partial_cmp(&m[j * dim + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[pivot * dim + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..dim {
                m.swap(pivot * dim + k, col * dim + k);
            }
            det = -det;
        }
        let p = m[col * dim + col];
        det *= p;
        for row in col + 1..dim {
            let f = m[row * dim + col] / p;
            for k in col..dim {
                let v = m[col * dim + k];
                m[row * dim + k] -= f * v;
            }
        }
    }
    det
}

/// Bures distance, always within `[0, √2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BuresDistance<T>(T);

impl<T: Scalar> BuresDistance<T> {
    /// Clamps a squared distance into `[0, 2]` and takes the root.
    pub fn from_squared(d2: T) -> Self {
        let two = lit::<T>(2.0);
        Self(d2.max(T::zero()).min(two).sqrt())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn squared(self) -> T {
        self.0 * self.0
    }
}

/// Bures metric of `family` at `point`.
pub fn metric_at<T: Scalar, F: ParamFamily<T> + ?Sized>(
    family: &F,
    point: &ChartPoint<T>,
) -> Result<MetricTensor<T>> {
    family.check_interior(point)?;
    let rho = family.density(point)?;
    let spectrum = rho.eigh()?;
    let lambda = spectrum.eigenvalues();
    if lambda[0] <= lit(INTERIOR_EIGENVALUE) {
        return Err(Error::Boundary(format!(
            "smallest eigenvalue {:e} of {} is not above {INTERIOR_EIGENVALUE:e}",
            to_f64(lambda[0]),
            family.label()
        )));
    }
    let k = family.n_params();
    let derivs: Vec<ComplexMatrix<T>> = (0..k)
        .map(|a| spectrum.to_eigenbasis(family.derivative(point, a)?.matrix()))
        .collect::<Result<_>>()?;
    pullback(lambda, &derivs)
}

/// `g_ab = ½ Σ_{ij} Re[(D_a)_{ij} conj((D_b)_{ij})] / (λ_i + λ_j)` for
/// derivative matrices `D_a` already expressed in the eigenbasis.
pub(crate) fn pullback<T: Scalar>(lambda: &[T], derivs: &[ComplexMatrix<T>]) -> Result<MetricTensor<T>> {
    let k = derivs.len();
    let n = lambda.len();
    let half = lit::<T>(0.5);
    let mut g = vec![T::zero(); k * k];
    for i in 0..n {
        for j in 0..n {
            let denom = lambda[i] + lambda[j];
            if denom < lit(SMALL_DENOMINATOR) {
                let worst = derivs
                    .iter()
                    .map(|d| d[(i, j)].norm_sqr())
                    .fold(T::zero(), |m, x| m.max(x));
                if worst < lit(SMALL_NUMERATOR) {
                    continue;
                }
                return Err(Error::RankDeficiency {
                    i,
                    j,
                    denominator: to_f64(denom),
                    numerator: to_f64(worst),
                });
            }
            let inv = half / denom;
            for a in 0..k {
                let da = derivs[a][(i, j)];
                for b in a..k {
                    let db = derivs[b][(i, j)];
                    g[a * k + b] += (da * db.conj()).re * inv;
                }
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            g[a * k + b] = g[b * k + a];
        }
    }
    MetricTensor::new(k, g)
}

/// `d_B(ρ₁, ρ₂) = √(2 − 2 tr √(√ρ₁ ρ₂ √ρ₁))`.
pub fn bures_distance<T: Scalar>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
) -> Result<BuresDistance<T>> {
    Ok(BuresDistance::from_squared(
        lit::<T>(2.0) - lit::<T>(2.0) * fidelity(rho1, rho2)?,
    ))
}

/// Root fidelity `tr √(√ρ₁ ρ₂ √ρ₁)`.
pub fn fidelity<T: Scalar>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::Shape(format!(
            "density matrices are {0}x{0} and {1}x{1}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let root = sqrtm_psd(rho1.hermitian())?;
    let inner = root.matrix().matmul(rho2.matrix())?.matmul(root.matrix())?;
    let spec = HermitianMatrix::hermitian_part(&inner).eigh()?;
    Ok(spec
        .eigenvalues()
        .iter()
        .map(|&l| l.max(T::zero()).sqrt())
        .sum())
}

/// Bures distance between `ζ_n(β₁)` and `ζ_n(β₂)` from the shared spectrum.
///
/// Uses `d² = Σ_q m_q (√λ_q⁽¹⁾ − √λ_q⁽²⁾)²`, which equals
/// `2 − 2 Σ_q m_q √(λ_q⁽¹⁾ λ_q⁽²⁾)` because both traces are 1, but has no
/// cancellation for nearby `β`. Every term is formed from logs, so `n` in the
/// hundreds is fine.
pub fn bures_distance_commuting<T: Scalar>(
    spec1: &EnsembleSpec<T>,
    spec2: &EnsembleSpec<T>,
) -> Result<BuresDistance<T>> {
    if spec1.n() != spec2.n() {
        return Err(Error::Shape(format!(
            "ensembles have n = {} and n = {}",
            spec1.n(),
            spec2.n()
        )));
    }
    // order the pair so the result is exactly symmetric
    let (a, b) = if spec1.beta() <= spec2.beta() {
        (spec1, spec2)
    } else {
        (spec2, spec1)
    };
    let ba = eigen_branches(a)?;
    let bb = eigen_branches(b)?;
    let half = lit::<T>(0.5);
    let d2 = ba
        .iter()
        .zip(&bb)
        .map(|(x, y)| {
            let rel = (half * (y.log_lambda - x.log_lambda)).exp_m1();
            (x.log_mass()).exp() * rel * rel
        })
        .sum::<T>();
    Ok(BuresDistance::from_squared(d2))
}

/// The textbook fidelity form of [`bures_distance_commuting`]:
/// `√(2 − 2 Σ_q m_q √(λ_q⁽¹⁾ λ_q⁽²⁾))`, summed with a max-shift in log
/// space. Loses accuracy when the two states are close.
pub fn bures_distance_commuting_fidelity<T: Scalar>(
    spec1: &EnsembleSpec<T>,
    spec2: &EnsembleSpec<T>,
) -> Result<BuresDistance<T>> {
    if spec1.n() != spec2.n() {
        return Err(Error::Shape(format!(
            "ensembles have n = {} and n = {}",
            spec1.n(),
            spec2.n()
        )));
    }
    let half = lit::<T>(0.5);
    let logs: Vec<T> = eigen_branches(spec1)?
        .iter()
        .zip(&eigen_branches(spec2)?)
        .map(|(x, y)| x.log_mult + half * (x.log_lambda + y.log_lambda))
        .collect();
    let f = crate::special::log_sum_exp(logs).exp();
    Ok(BuresDistance::from_squared(lit::<T>(2.0) * (T::one() - f)))
}

/// Default finite-difference step in `β`: `1e-3 · max(1, β)`.
pub fn default_step<T: Scalar>(beta: T) -> T {
    lit::<T>(1e-3) * beta.max(T::one())
}

/// Richardson combination of a second-order estimate at steps `h` and `h/2`.
fn richardson<T: Scalar>(coarse: T, fine: T) -> T {
    (lit::<T>(4.0) * fine - coarse) / lit(3.0)
}

/// `g_ββ = tr (d√ζ/dβ)²`, the Hilbert–Schmidt metric on square roots, which
/// coincides with the Bures metric for a commuting family.
///
/// Each branch contributes `m λ (d ln λ / dβ)² / 4`; the log-derivative is a
/// central difference at `step` and `step / 2`, Richardson-extrapolated.
pub fn hs_on_roots_metric<T: Scalar>(spec: &EnsembleSpec<T>, step: T) -> Result<T> {
    let beta = spec.beta();
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {}", to_f64(step))));
    }
    if beta <= step {
        return Err(Error::Domain(format!(
            "β = {} must exceed the difference step {}",
            to_f64(beta),
            to_f64(step)
        )));
    }
    let branches = eigen_branches(spec)?;
    let n = spec.n();
    let log_lambda_at = |b: T, q: usize| -> Result<T> { Ok(EnsembleSpec::new(n, b)?.log_lambda(q)) };
    let quarter = lit::<T>(0.25);
    let mut g = T::zero();
    for br in &branches {
        let central = |h: T| -> Result<T> {
            Ok((log_lambda_at(beta + h, br.q)? - log_lambda_at(beta - h, br.q)?) / (h + h))
        };
        let slope = richardson(central(step)?, central(step * lit(0.5))?);
        g += br.log_mass().exp() * slope * slope * quarter;
    }
    Ok(g)
}

/// `(Σ_{j<k} ln(x+j), Σ_{j<k} 1/(x+j))`: `ln Γ(x+k) − ln Γ(x)` and its
/// derivative in `x`.
fn ln_rising<T: Scalar>(x: T, k: usize) -> (T, T) {
    (0..k).fold((T::zero(), T::zero()), |(l, d), j| {
        let y = x + lit::<T>(j as f64);
        (l + y.ln(), d + y.recip())
    })
}

/// `g_ββ` without finite differences.
///
/// Every Gamma ratio in `λ_{n,q}` differs in its argument by an integer once
/// the factors are paired suitably, so `ln λ` and `d ln λ / dβ` reduce to
/// finite sums of `ln(β + c)` and `1/(β + c)`. Unlike differencing `ln Γ`
/// values, which grow like `β ln β`, this stays accurate for very large `β`.
pub fn spectral_metric<T: Scalar>(spec: &EnsembleSpec<T>) -> Result<T> {
    let n = spec.n();
    let beta = spec.beta();
    check_beta(beta)?;
    let half_n = lit::<T>(0.5 * n as f64);
    let three_halves = lit::<T>(1.5);
    // Pairs the denominators Γ(1+β+n/2) and Γ(3/2+β+n/2) with the numerators
    // Γ(3/2+β) and Γ(1+β−q+n) so that all argument gaps are integers.
    let (outer_base, outer_len, inner_base) = if n.is_multiple_of(2) {
        (three_halves + beta, n / 2, T::one() + beta + half_n)
    } else {
        (three_halves + beta, (n - 1) / 2, three_halves + beta + half_n)
    };
    let (outer, d_outer) = ln_rising(outer_base, outer_len);
    let quarter = lit::<T>(0.25);
    let mut g = T::zero();
    for q in 0..=n / 2 {
        let (rise, d_rise) = ln_rising(beta, q);
        let inner_len = if n.is_multiple_of(2) { n / 2 - q } else { (n - 1) / 2 - q };
        let (inner, d_inner) = ln_rising(inner_base, inner_len);
        let log_lambda = -lit::<T>(n as f64) * T::LN_2() - outer + rise + inner;
        let slope = -d_outer + d_rise + d_inner;
        g += (log_multiplicity::<T>(n, q)? + log_lambda).exp() * slope * slope * quarter;
    }
    Ok(g)
}

/// `g_ββ = ½ d²/dt² [d_B(ζ(β), ζ(β+t))²]` at `t = 0` by a symmetric second
/// difference of the squared distance at `t_step` and `t_step / 2`,
/// Richardson-extrapolated. The zero-offset term is exactly 0 and is not
/// evaluated.
pub fn metric_from_distance<T: Scalar>(
    dist: impl Fn(T, T) -> Result<BuresDistance<T>>,
    beta: T,
    t_step: T,
) -> Result<T> {
    check_beta(beta)?;
    if !(t_step > T::zero()) || !t_step.is_finite() {
        return Err(Error::Accuracy(format!(
            "step must be positive and finite, got {}",
            to_f64(t_step)
        )));
    }
    let scale = beta.max(T::one());
    if t_step < lit::<T>(1e-6) * scale {
        return Err(Error::Accuracy(format!(
            "step {} is small enough for rounding in d_B² to dominate",
            to_f64(t_step)
        )));
    }
    if t_step > lit::<T>(0.25) * beta {
        return Err(Error::Accuracy(format!(
            "step {} is too large relative to β = {}",
            to_f64(t_step),
            to_f64(beta)
        )));
    }
    let half = lit::<T>(0.5);
    let second = |t: T| -> Result<T> {
        let plus = dist(beta, beta + t)?.squared();
        let minus = dist(beta, beta - t)?.squared();
        Ok(half * (plus + minus) / (t * t))
    };
    Ok(richardson(second(t_step)?, second(t_step * half)?))
}

/// Distance function over `β` for the `n`-qubit ensemble, for use with
/// [`metric_from_distance`].
pub fn ensemble_distance<T: Scalar>(n: usize) -> impl Fn(T, T) -> Result<BuresDistance<T>> {
    move |b1, b2| bures_distance_commuting(&EnsembleSpec::new(n, b1)?, &EnsembleSpec::new(n, b2)?)
}
