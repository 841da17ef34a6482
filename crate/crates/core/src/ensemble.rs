//! Gibbs-averaged tensor-power ensembles `ζ_n(β)`.
//!
//! `ζ_n(β)` is the average of `ρ^{⊗n}` over the Bloch ball, weighted by
//! `Γ(3/2+β) r² sinθ / (π^{3/2} Γ(β) (1−r²)^{1−β})`. It has `⌊n/2⌋ + 1`
//! distinct eigenvalues, available in closed form; all `ζ_n(β)` with the same
//! `n` commute. Eigenvalues are handled in log space so that `n` in the
//! hundreds does not underflow.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::families::rho_complex;
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, to_f64, Scalar};
use crate::special::{ln_binomial, ln_gamma, log_sum_exp};

/// Largest `n` for which [`averaged_matrix`] materializes `ζ_n(β)`.
pub const MAX_DENSE_N: usize = 7;

/// Identifies `ζ_n(β)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec<T> {
    n: usize,
    beta: T,
}

impl<T: Scalar> EnsembleSpec<T> {
    pub fn new(n: usize, beta: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("ensemble needs n >= 1".into()));
        }
        check_beta(beta)?;
        Ok(Self { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `ln λ_{n,q}`.
    pub fn log_lambda(&self, q: usize) -> T {
        let n = lit::<T>(self.n as f64);
        let q = lit::<T>(q as f64);
        let b = self.beta;
        let one = T::one();
        let three_halves = lit::<T>(1.5);
        let half_n = lit::<T>(0.5) * n;
        -n * T::LN_2() + ln_gamma(three_halves + b) + ln_gamma(b + q) + ln_gamma(one + b - q + n)
            - ln_gamma(b)
            - ln_gamma(one + b + half_n)
            - ln_gamma(three_halves + b + half_n)
    }

    pub fn branch_count(&self) -> usize {
        self.n / 2 + 1
    }
}

pub(crate) fn check_beta<T: Scalar>(beta: T) -> Result<()> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "β must be a positive finite number, got {}",
            to_f64(beta)
        )));
    }
    Ok(())
}

/// One distinct eigenvalue of `ζ_n(β)` and its multiplicity, both as
/// natural logs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenBranch<T> {
    pub q: usize,
    pub log_lambda: T,
    pub log_mult: T,
}

impl<T: Scalar> EigenBranch<T> {
    pub fn lambda(&self) -> T {
        self.log_lambda.exp()
    }

    pub fn mult(&self) -> T {
        self.log_mult.exp()
    }

    /// `ln(m λ)`: log of the total weight the branch carries in the trace.
    pub fn log_mass(&self) -> T {
        self.log_mult + self.log_lambda
    }
}

/// `ln m_{n,q} = 2 ln(n−2q+1) − ln(n+1) + ln C(n+1, q)`.
pub fn log_multiplicity<T: Scalar>(n: usize, q: usize) -> Result<T> {
    check_branch(n, q)?;
    let nf = lit::<T>(n as f64);
    let width = lit::<T>((n - 2 * q + 1) as f64);
    Ok(lit::<T>(2.0) * width.ln() - (nf + T::one()).ln()
        + ln_binomial(nf + T::one(), lit(q as f64)))
}

fn check_branch(n: usize, q: usize) -> Result<()> {
    if q > n / 2 {
        return Err(Error::Domain(format!(
            "branch index q = {q} outside [0, {}] for n = {n}",
            n / 2
        )));
    }
    Ok(())
}

/// All `⌊n/2⌋ + 1` eigenvalue branches, `q = 0, 1, …`.
pub fn eigen_branches<T: Scalar>(spec: &EnsembleSpec<T>) -> Result<Vec<EigenBranch<T>>> {
    check_beta(spec.beta)?;
    (0..spec.branch_count())
        .map(|q| {
            Ok(EigenBranch {
                q,
                log_lambda: spec.log_lambda(q),
                log_mult: log_multiplicity(spec.n, q)?,
            })
        })
        .collect()
}

/// `Σ_q m_{n,q} λ_{n,q}`, accumulated in log space. Equals 1 for a valid
/// ensemble.
pub fn trace_identity<T: Scalar>(spec: &EnsembleSpec<T>) -> Result<T> {
    let branches = eigen_branches(spec)?;
    Ok(log_sum_exp(branches.iter().map(EigenBranch::log_mass)).exp())
}

/// Exact multiplicity `(n−2q+1)² C(n+1, q) / (n+1)`.
pub fn multiplicity(n: usize, q: usize) -> Result<BigUint> {
    check_branch(n, q)?;
    let mut binom = BigUint::from(1u32);
    for k in 0..q {
        binom = binom * BigUint::from(n + 1 - k) / BigUint::from(k + 1);
    }
    let width = BigUint::from(n - 2 * q + 1);
    let numerator = &width * &width * binom;
    let denom = BigUint::from(n + 1);
    if !(&numerator % &denom).is_zero() {
        return Err(Error::InvariantViolation(format!(
            "multiplicity for (n = {n}, q = {q}) is not an integer"
        )));
    }
    Ok(numerator / denom)
}

/// Multiplicity as a `u64`, for `n` small enough to fit.
pub fn multiplicity_u64(n: usize, q: usize) -> Result<u64> {
    multiplicity(n, q)?
        .to_u64()
        .ok_or(Error::Size { dim: n, cap: 63 })
}

/// `Z(β) = √π Γ(β) / (2 Γ(3/2 + β))`.
pub fn partition_function<T: Scalar>(beta: T) -> Result<T> {
    check_beta(beta)?;
    let half = lit::<T>(0.5);
    Ok(half * T::PI().sqrt() * (ln_gamma(beta) - ln_gamma(lit::<T>(1.5) + beta)).exp())
}

/// Gibbs density `e^{−βE} √(1 − e^{−E}) / Z(β)` in the energy `E ≥ 0`.
pub fn gibbs_density<T: Scalar>(energy: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    if !(energy >= T::zero()) {
        return Err(Error::Domain(format!(
            "energy must be non-negative, got {}",
            to_f64(energy)
        )));
    }
    let structure = (-(-energy).exp_m1()).sqrt();
    Ok((-beta * energy).exp() * structure / partition_function(beta)?)
}

/// Averaging weight on the Bloch ball, density with respect to
/// `dr dθ dφ`:
/// `Γ(3/2+β) r² sinθ / (π^{3/2} Γ(β) (1−r²)^{1−β})`.
pub fn bloch_weight<T: Scalar>(r: T, theta: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    if r < T::zero() || r >= T::one() {
        return Err(Error::Domain(format!("r = {} outside [0, 1)", to_f64(r))));
    }
    let norm = (ln_gamma(lit::<T>(1.5) + beta) - ln_gamma(beta)).exp()
        / T::PI().powf(lit(1.5));
    Ok(norm * r * r * theta.sin() * (T::one() - r * r).powf(beta - T::one()))
}

/// Radial marginal of [`bloch_weight`]: the weight integrated over both
/// angles.
pub fn radial_weight<T: Scalar>(r: T, beta: T) -> Result<T> {
    let per_angle = bloch_weight(r, T::FRAC_PI_2(), beta)?;
    Ok(per_angle * lit(4.0) * T::PI())
}

const START_ORDER: usize = 32;
const ANGULAR_ORDER: usize = 32;
const CONVERGED_CHANGE: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const ACCEPTABLE_TRACE_DEVIATION: f64 = 1e-6;

/// Materializes `ζ_n(β)` by product quadrature over the Bloch ball.
///
/// The radius is substituted as `r = sin ψ`, which turns the
/// `(1−r²)^{β−1}` endpoint factor into `cos^{2β−1} ψ`; `ψ`, `cos θ` and `φ`
/// each get a Gauss–Legendre rule. The angular integrand is a trigonometric
/// polynomial of degree at most `n`, which 32 nodes per angle resolve to
/// rounding, so only the radial order doubles (from 32) until successive
/// results agree and the trace and Hermiticity residuals are below `1e-8`.
///
/// This is a brute-force construction that does not use the closed-form
/// spectrum, so it serves as an independent check on it.
pub fn averaged_matrix<T: Scalar>(spec: &EnsembleSpec<T>) -> Result<DensityMatrix<T>> {
    if spec.n > MAX_DENSE_N {
        return Err(Error::Size {
            dim: 1 << spec.n,
            cap: 1 << MAX_DENSE_N,
        });
    }
    let max_order = if spec.n <= 5 { 1024 } else { 128 };
    let mut order = START_ORDER;
    let mut previous = quadrature_average(spec, order)?;
    loop {
        let next_order = order * 2;
        let current = quadrature_average(spec, next_order)?;
        let change = current.sub(&previous)?.frobenius_norm();
        let trace_dev = (current.trace().re - T::one()).abs();
        let (herm, _, _) = current.hermiticity_defect();
        let settled = change <= lit(CONVERGED_CHANGE)
            && trace_dev <= lit(RESIDUAL_TOL)
            && herm <= lit(RESIDUAL_TOL);
        if settled || next_order >= max_order {
            if trace_dev > lit(ACCEPTABLE_TRACE_DEVIATION) {
                return Err(Error::Accuracy(format!(
                    "Bloch-ball quadrature for n = {}, β = {} has trace deviation {:e} at order {next_order}",
                    spec.n,
                    to_f64(spec.beta),
                    to_f64(trace_dev)
                )));
            }
            return Ok(DensityMatrix::from_trusted(HermitianMatrix::hermitian_part(
                &current,
            )));
        }
        previous = current;
        order = next_order;
    }
}

fn quadrature_average<T: Scalar>(spec: &EnsembleSpec<T>, order: usize) -> Result<ComplexMatrix<T>> {
    let rule = GaussLegendre::<T>::new(order);
    let angular = GaussLegendre::<T>::new(ANGULAR_ORDER);
    let beta = spec.beta;
    let norm = (ln_gamma(lit::<T>(1.5) + beta) - ln_gamma(beta)).exp() / T::PI().powf(lit(1.5));
    let dim = 1usize << spec.n;
    let mut acc = ComplexMatrix::<T>::zeros(dim);

    let radial: Vec<(T, T)> = rule
        .mapped(T::zero(), T::FRAC_PI_2())
        .map(|(psi, w)| {
            let (s, c) = psi.sin_cos();
            (s, w * s * s * c.powf(lit::<T>(2.0) * beta - T::one()))
        })
        .collect();
    let polar: Vec<(T, T)> = angular.mapped(-T::one(), T::one()).collect();
    let azimuth: Vec<(T, T)> = angular.mapped(T::zero(), T::PI() + T::PI()).collect();

    for &(r, wr) in &radial {
        for &(x, wx) in &polar {
            let theta = x.acos();
            for &(phi, wp) in &azimuth {
                let rho = rho_complex(r, theta, phi)?;
                let weight = norm * wr * wx * wp;
                accumulate_power(&mut acc, rho.matrix(), spec.n, weight);
            }
        }
    }
    Ok(acc)
}

fn accumulate_power<T: Scalar>(acc: &mut ComplexMatrix<T>, rho: &ComplexMatrix<T>, n: usize, weight: T) {
    let mut power = rho.clone();
    for _ in 1..n {
        power = power.kron_unchecked(rho);
    }
    let dim = acc.dim();
    for i in 0..dim {
        for j in 0..dim {
            acc[(i, j)] += power[(i, j)] * weight;
        }
    }
}

/// Closed-form `g_ββ` for `2 ≤ n ≤ 7`.
pub fn reference_g_bb<T: Scalar>(n: usize, beta: T) -> Result<T> {
    check_beta(beta)?;
    let b = beta;
    let f = |x: f64| lit::<T>(x);
    let poly = |coeffs: &[f64]| coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * b + f(c));
    let sq = |x: T| x * x;
    let four_b = f(4.0) * b;
    let value = match n {
        2 => f(3.0) / (four_b * (f(2.0) + b) * sq(f(3.0) + f(2.0) * b)),
        3 => f(9.0) / (four_b * (f(3.0) + b) * sq(f(3.0) + f(2.0) * b)),
        4 => {
            f(9.0) * poly(&[145.0, 310.0, 230.0, 72.0, 8.0])
                / (four_b
                    * (T::one() + b)
                    * (f(3.0) + b)
                    * (f(4.0) + b)
                    * sq(f(3.0) + f(2.0) * b)
                    * sq(f(5.0) + f(2.0) * b))
        }
        5 => {
            f(15.0) * poly(&[185.0, 380.0, 270.0, 80.0, 8.0])
                / (four_b
                    * (T::one() + b)
                    * (f(4.0) + b)
                    * (f(5.0) + b)
                    * sq(f(3.0) + f(2.0) * b)
                    * sq(f(5.0) + f(2.0) * b))
        }
        6 => {
            f(45.0)
                * poly(&[
                    43260.0, 143640.0, 201740.0, 157170.0, 74361.0, 21864.0, 3896.0, 384.0, 16.0,
                ])
                / (four_b
                    * (T::one() + b)
                    * (f(2.0) + b)
                    * (f(4.0) + b)
                    * (f(5.0) + b)
                    * (f(6.0) + b)
                    * sq(f(3.0) + f(2.0) * b)
                    * sq(f(5.0) + f(2.0) * b)
                    * sq(f(7.0) + f(2.0) * b))
        }
        7 => {
            f(63.0)
                * poly(&[
                    61950.0, 200025.0, 273140.0, 206472.0, 94369.0, 26616.0, 4504.0, 416.0, 16.0,
                ])
                / (four_b
                    * (T::one() + b)
                    * (f(2.0) + b)
                    * (f(5.0) + b)
                    * (f(6.0) + b)
                    * (f(7.0) + b)
                    * sq(f(3.0) + f(2.0) * b)
                    * sq(f(5.0) + f(2.0) * b)
                    * sq(f(7.0) + f(2.0) * b))
        }
        _ => {
            return Err(Error::Domain(format!(
                "closed-form g_ββ is only tabulated for 2 ≤ n ≤ 7, got n = {n}"
            )))
        }
    };
    Ok(value)
}

/// Diagonal of `ζ_n(β)` in a shared eigenbasis: every eigenvalue repeated
/// by its multiplicity, ascending. Only for small `n`.
pub fn expanded_spectrum<T: Scalar>(spec: &EnsembleSpec<T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(1 << spec.n.min(20));
    for b in eigen_branches(spec)? {
        let m = multiplicity_u64(spec.n, b.q)?;
        out.extend(std::iter::repeat_n(b.lambda(), m as usize));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn two_qubit_branches() {
        let spec = EnsembleSpec::new(2, 1.0).unwrap();
        let b = eigen_branches(&spec).unwrap();
        assert_eq!(b.len(), 2);
        assert_relative_eq!(b[0].lambda(), 0.3, max_relative = 1e-13);
        assert_relative_eq!(b[0].mult(), 3.0, max_relative = 1e-13);
        assert_relative_eq!(b[1].lambda(), 0.1, max_relative = 1e-13);
        assert_relative_eq!(b[1].mult(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn two_qubit_branches_match_simplified_ratios() {
        for beta in [0.2, 0.7, 3.0, 11.0] {
            let b = eigen_branches(&EnsembleSpec::new(2, beta).unwrap()).unwrap();
            let denom = 2.0 * (3.0 + 2.0 * beta);
            assert_relative_eq!(b[0].lambda(), (2.0 + beta) / denom, max_relative = 1e-12);
            assert_relative_eq!(b[1].lambda(), beta / denom, max_relative = 1e-12);
        }
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(2, 0).unwrap(), BigUint::from(3u32));
        assert_eq!(multiplicity(2, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(multiplicity_u64(4, 1).unwrap(), 9);
        assert!(matches!(multiplicity(4, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn multiplicities_sum_to_dimension() {
        for n in 1..=64usize {
            let total: BigUint = (0..=n / 2).map(|q| multiplicity(n, q).unwrap()).sum();
            assert_eq!(total, BigUint::from(1u8) << n, "n = {n}");
        }
    }

    #[test]
    fn log_multiplicity_near_integer() {
        for n in 1..=60usize {
            for q in 0..=n / 2 {
                let exact = multiplicity(n, q).unwrap().to_f64().unwrap();
                let approx = log_multiplicity::<f64>(n, q).unwrap().exp();
                assert!(
                    (approx - exact).abs() <= 1e-6f64.max(exact * 1e-13),
                    "n = {n}, q = {q}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn trace_identity_holds() {
        let t = trace_identity(&EnsembleSpec::new(7, 0.37).unwrap()).unwrap();
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-12);
        let spec = EnsembleSpec::<f64>::new(100, 1.0).unwrap();
        let b = eigen_branches(&spec).unwrap();
        assert_eq!(b.len(), 51);
        assert!(b.iter().all(|x| x.log_lambda.is_finite() && x.log_mult.is_finite()));
        assert_abs_diff_eq!(trace_identity(&spec).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn partition_function_values() {
        assert_relative_eq!(partition_function(1.0).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            partition_function(0.5).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-14
        );
        assert!(matches!(partition_function(0.0), Err(Error::Domain(_))));
        assert!(matches!(partition_function(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gibbs_density_edges() {
        assert_eq!(gibbs_density(0.0, 1.3).unwrap(), 0.0);
        assert!(matches!(gibbs_density(-0.1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gibbs_density(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_forms_at_one() {
        assert_relative_eq!(reference_g_bb(2, 1.0).unwrap(), 0.01, max_relative = 1e-14);
        assert_relative_eq!(reference_g_bb(3, 1.0).unwrap(), 0.0225, max_relative = 1e-14);
        assert_relative_eq!(
            reference_g_bb(4, 1.0).unwrap(),
            6885.0 / 196000.0,
            max_relative = 1e-14
        );
        assert!(matches!(reference_g_bb(8, 1.0), Err(Error::Domain(_))));
        assert!(matches!(reference_g_bb(1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_qubit_average_is_maximally_mixed() {
        for beta in [0.5, 1.0, 2.0] {
            let z = averaged_matrix(&EnsembleSpec::new(1, beta).unwrap()).unwrap();
            let d = z
                .hermitian()
                .sub(DensityMatrix::maximally_mixed(2).hermitian())
                .unwrap();
            assert!(d.matrix().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn dense_oracle_size_cap() {
        assert!(matches!(
            averaged_matrix(&EnsembleSpec::new(8, 1.0).unwrap()),
            Err(Error::Size { .. })
        ));
    }
}
