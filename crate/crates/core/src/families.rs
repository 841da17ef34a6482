//! Parameterized density-matrix charts with analytic parameter derivatives.
//!
//! * [`RealQubit`]: real 2×2 states on the unit disk, coordinates `(r, θ)`.
//! * [`ComplexQubit`]: the Bloch ball in spherical coordinates `(r, θ, φ)`.
//! * [`Product`]: `n`-fold tensor power of any family, differentiated with the
//!   Leibniz rule.
//! * [`Conjugated`]: a family rotated by a fixed unitary.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    check_power_dim, kron, tensor_power, ComplexMatrix, DensityMatrix, HermitianMatrix,
    DEFAULT_MAX_DIM,
};
use crate::scalar::{lit, to_f64, Scalar};

/// Distance from `r = 1` below which metric computations refuse a point.
pub const BOUNDARY_MARGIN: f64 = 1e-8;

/// Coordinates of a point in a chart. Radii are dimensionless, angles in
/// radians. Angles are not range-reduced: every chart here is periodic in
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<T> {
    coords: Vec<T>,
}

impl<T: Scalar> ChartPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn polar(r: T, theta: T) -> Self {
        Self::new(vec![r, theta])
    }

    pub fn spherical(r: T, theta: T, phi: T) -> Self {
        Self::new(vec![r, theta, phi])
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, axis: usize) -> T {
        self.coords[axis]
    }

    /// Copy with `coords[axis] += delta`.
    pub fn shifted(&self, axis: usize, delta: T) -> Self {
        let mut coords = self.coords.clone();
        coords[axis] += delta;
        Self { coords }
    }

    pub fn displaced(&self, delta: &[T]) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(delta)
                .map(|(&x, &d)| x + d)
                .collect(),
        }
    }
}

/// A chart: parameter vector → density matrix, with parameter derivatives.
pub trait ParamFamily<T: Scalar>: Send + Sync {
    fn label(&self) -> String;

    fn n_params(&self) -> usize;

    /// Hilbert-space dimension of the states.
    fn dim(&self) -> usize;

    fn density(&self, point: &ChartPoint<T>) -> Result<DensityMatrix<T>>;

    /// `∂ρ/∂x_axis` at `point`. Traceless, since every state has unit trace.
    fn derivative(&self, point: &ChartPoint<T>, axis: usize) -> Result<HermitianMatrix<T>>;

    /// Rejects points where the metric is undefined (pure states).
    fn check_interior(&self, _point: &ChartPoint<T>) -> Result<()> {
        Ok(())
    }

    /// Central finite difference of [`ParamFamily::density`] along `axis`.
    fn finite_difference(
        &self,
        point: &ChartPoint<T>,
        axis: usize,
        step: T,
    ) -> Result<HermitianMatrix<T>> {
        let plus = self.density(&point.shifted(axis, step))?;
        let minus = self.density(&point.shifted(axis, -step))?;
        Ok(plus
            .hermitian()
            .sub(minus.hermitian())?
            .scale(T::one() / (step + step)))
    }
}

fn check_arity<T: Scalar>(point: &ChartPoint<T>, n: usize, label: &str) -> Result<()> {
    if point.len() != n {
        return Err(Error::Shape(format!(
            "{label} chart takes {n} coordinates, got {}",
            point.len()
        )));
    }
    if point.coords().iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("{label} coordinates must be finite")));
    }
    Ok(())
}

fn check_radius<T: Scalar>(r: T) -> Result<()> {
    if r < T::zero() || r > T::one() {
        return Err(Error::Domain(format!("r = {} outside [0, 1]", to_f64(r))));
    }
    Ok(())
}

fn check_radius_interior<T: Scalar>(r: T) -> Result<()> {
    if r >= T::one() - lit(BOUNDARY_MARGIN) {
        return Err(Error::Boundary(format!(
            "r = {} is within {BOUNDARY_MARGIN:e} of the pure-state sphere",
            to_f64(r)
        )));
    }
    Ok(())
}

fn axis_error(label: &str, axis: usize, n: usize) -> Error {
    Error::Shape(format!("{label} chart has {n} axes, asked for axis {axis}"))
}

fn real_2x2<T: Scalar>(a: T, b: T, d: T) -> HermitianMatrix<T> {
    let z = T::zero();
    HermitianMatrix::from_trusted(ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex::new(a, z),
        (1, 1) => Complex::new(d, z),
        _ => Complex::new(b, z),
    }))
}

/// `[[a, b], [conj(b), d]]` with real `a`, `d`.
fn herm_2x2<T: Scalar>(a: T, b: Complex<T>, d: T) -> HermitianMatrix<T> {
    let z = T::zero();
    HermitianMatrix::from_trusted(ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex::new(a, z),
        (0, 1) => b,
        (1, 0) => b.conj(),
        _ => Complex::new(d, z),
    }))
}

/// `½ [[1 + r cosθ, r sinθ], [r sinθ, 1 − r cosθ]]`.
pub fn rho_real<T: Scalar>(r: T, theta: T) -> Result<DensityMatrix<T>> {
    check_radius(r)?;
    let half = lit::<T>(0.5);
    let (s, c) = theta.sin_cos();
    Ok(DensityMatrix::from_trusted(real_2x2(
        half * (T::one() + r * c),
        half * r * s,
        half * (T::one() - r * c),
    )))
}

/// Bloch-ball state with Bloch vector `r (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn rho_complex<T: Scalar>(r: T, theta: T, phi: T) -> Result<DensityMatrix<T>> {
    check_radius(r)?;
    let half = lit::<T>(0.5);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(DensityMatrix::from_trusted(herm_2x2(
        half * (T::one() + r * ct),
        Complex::new(r * st * cp, -(r * st * sp)) * half,
        half * (T::one() - r * ct),
    )))
}

/// Real qubit states, `(r, θ)` on the unit disk.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealQubit;

impl<T: Scalar> ParamFamily<T> for RealQubit {
    fn label(&self) -> String {
        "real".into()
    }

    fn n_params(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        2
    }

    fn density(&self, point: &ChartPoint<T>) -> Result<DensityMatrix<T>> {
        check_arity(point, 2, "real")?;
        rho_real(point.get(0), point.get(1))
    }

    fn derivative(&self, point: &ChartPoint<T>, axis: usize) -> Result<HermitianMatrix<T>> {
        check_arity(point, 2, "real")?;
        let (r, theta) = (point.get(0), point.get(1));
        check_radius(r)?;
        let half = lit::<T>(0.5);
        let (s, c) = theta.sin_cos();
        match axis {
            0 => Ok(real_2x2(half * c, half * s, -half * c)),
            1 => Ok(real_2x2(-half * r * s, half * r * c, half * r * s)),
            _ => Err(axis_error("real", axis, 2)),
        }
    }

    fn check_interior(&self, point: &ChartPoint<T>) -> Result<()> {
        check_arity(point, 2, "real")?;
        check_radius(point.get(0))?;
        check_radius_interior(point.get(0))
    }
}

/// Complex qubit states, `(r, θ, φ)` on the Bloch ball.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexQubit;

impl<T: Scalar> ParamFamily<T> for ComplexQubit {
    fn label(&self) -> String {
        "complex".into()
    }

    fn n_params(&self) -> usize {
        3
    }

    fn dim(&self) -> usize {
        2
    }

    fn density(&self, point: &ChartPoint<T>) -> Result<DensityMatrix<T>> {
        check_arity(point, 3, "complex")?;
        rho_complex(point.get(0), point.get(1), point.get(2))
    }

    fn derivative(&self, point: &ChartPoint<T>, axis: usize) -> Result<HermitianMatrix<T>> {
        check_arity(point, 3, "complex")?;
        let (r, theta, phi) = (point.get(0), point.get(1), point.get(2));
        check_radius(r)?;
        let half = lit::<T>(0.5);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        // e^{-iφ}
        let rot = Complex::new(cp, -sp);
        match axis {
            0 => Ok(herm_2x2(half * ct, rot * (half * st), -half * ct)),
            1 => Ok(herm_2x2(-half * r * st, rot * (half * r * ct), half * r * st)),
            2 => {
                let minus_i = Complex::new(T::zero(), -T::one());
                Ok(herm_2x2(
                    T::zero(),
                    minus_i * rot * (half * r * st),
                    T::zero(),
                ))
            }
            _ => Err(axis_error("complex", axis, 3)),
        }
    }

    fn check_interior(&self, point: &ChartPoint<T>) -> Result<()> {
        check_arity(point, 3, "complex")?;
        check_radius(point.get(0))?;
        check_radius_interior(point.get(0))
    }
}

/// `n`-fold tensor power of a base family, sharing its chart.
#[derive(Clone)]
pub struct Product<T: Scalar> {
    base: Arc<dyn ParamFamily<T>>,
    n: usize,
    dim: usize,
}

impl<T: Scalar> Product<T> {
    pub fn new(base: Arc<dyn ParamFamily<T>>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("product family needs n >= 1".into()));
        }
        let dim = check_power_dim(base.dim(), n, DEFAULT_MAX_DIM)?;
        Ok(Self { base, n, dim })
    }

    pub fn real(n: usize) -> Result<Self> {
        Self::new(Arc::new(RealQubit), n)
    }

    pub fn complex(n: usize) -> Result<Self> {
        Self::new(Arc::new(ComplexQubit), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl<T: Scalar> ParamFamily<T> for Product<T> {
    fn label(&self) -> String {
        format!("{}^{}", self.base.label(), self.n)
    }

    fn n_params(&self) -> usize {
        self.base.n_params()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn density(&self, point: &ChartPoint<T>) -> Result<DensityMatrix<T>> {
        tensor_power(&self.base.density(point)?, self.n)
    }

    /// Leibniz rule: `Σ_k ρ^{⊗k} ⊗ ∂ρ ⊗ ρ^{⊗(n-1-k)}`.
    fn derivative(&self, point: &ChartPoint<T>, axis: usize) -> Result<HermitianMatrix<T>> {
        let rho = self.base.density(point)?.into_hermitian();
        let d = self.base.derivative(point, axis)?;
        let mut powers = Vec::with_capacity(self.n);
        powers.push(HermitianMatrix::identity(1));
        for k in 1..self.n {
            let next = kron(&powers[k - 1], &rho)?;
            powers.push(next);
        }
        let mut total: Option<HermitianMatrix<T>> = None;
        for k in 0..self.n {
            let term = kron(&kron(&powers[k], &d)?, &powers[self.n - 1 - k])?;
            total = Some(match total {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        Ok(total.expect("n >= 1"))
    }

    fn check_interior(&self, point: &ChartPoint<T>) -> Result<()> {
        self.base.check_interior(point)
    }
}

/// A family conjugated by a fixed unitary: `x ↦ U ρ(x) U†`.
#[derive(Clone)]
pub struct Conjugated<T: Scalar> {
    base: Arc<dyn ParamFamily<T>>,
    unitary: ComplexMatrix<T>,
}

impl<T: Scalar> Conjugated<T> {
    /// Fails when `unitary` is not unitary to within `1e-10` (Frobenius).
    pub fn new(base: Arc<dyn ParamFamily<T>>, unitary: ComplexMatrix<T>) -> Result<Self> {
        if unitary.dim() != base.dim() {
            return Err(Error::Shape(format!(
                "unitary is {0}x{0}, family states are {1}x{1}",
                unitary.dim(),
                base.dim()
            )));
        }
        let defect = unitary
            .adjoint()
            .matmul(&unitary)?
            .sub(&ComplexMatrix::identity(unitary.dim()))?
            .frobenius_norm();
        if defect > lit(1e-10) {
            return Err(Error::Precondition(format!(
                "matrix is not unitary (defect {:e})",
                to_f64(defect)
            )));
        }
        Ok(Self { base, unitary })
    }
}

impl<T: Scalar> ParamFamily<T> for Conjugated<T> {
    fn label(&self) -> String {
        format!("U·{}·U†", self.base.label())
    }

    fn n_params(&self) -> usize {
        self.base.n_params()
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn density(&self, point: &ChartPoint<T>) -> Result<DensityMatrix<T>> {
        let rho = self.base.density(point)?;
        Ok(DensityMatrix::from_trusted(
            rho.hermitian().conjugate_by(&self.unitary)?,
        ))
    }

    fn derivative(&self, point: &ChartPoint<T>, axis: usize) -> Result<HermitianMatrix<T>> {
        self.base
            .derivative(point, axis)?
            .conjugate_by(&self.unitary)
    }

    fn check_interior(&self, point: &ChartPoint<T>) -> Result<()> {
        self.base.check_interior(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn close(a: &HermitianMatrix<f64>, b: &HermitianMatrix<f64>, tol: f64) -> bool {
        a.sub(b).unwrap().matrix().frobenius_norm() <= tol
    }

    #[test]
    fn rho_real_examples() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(close(rho_real(0.0, 2.7).unwrap().hermitian(), mixed.hermitian(), 1e-16));
        let pure = rho_real(1.0, 0.0).unwrap();
        assert!(close(pure.hermitian(), &HermitianMatrix::diagonal(&[1.0, 0.0]), 1e-16));
        let m = rho_real(0.5, PI / 2.0).unwrap();
        let want = HermitianMatrix::from_real_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(close(m.hermitian(), &want, 1e-16));
        assert!(matches!(rho_real(1.2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(rho_real(-0.1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rho_complex_examples() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(close(rho_complex(0.0, 1.0, 2.0).unwrap().hermitian(), mixed.hermitian(), 1e-16));
        let x = rho_complex(1.0, PI / 2.0, 0.0).unwrap();
        let want = HermitianMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(close(x.hermitian(), &want, 1e-15));
        // y axis: off-diagonal -i/2 in the upper corner
        let y = rho_complex(1.0, PI / 2.0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(y.hermitian().get(0, 1).im, -0.5, epsilon = 1e-15);
        assert!(matches!(rho_complex(1.5, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn purity_spectrum() {
        for &(r, t, p) in &[(0.3, 0.2, 5.0), (0.77, 2.9, 1.1), (0.05, 1.4, 3.3)] {
            let s = rho_complex(r, t, p).unwrap().eigh().unwrap();
            assert_abs_diff_eq!(s.eigenvalues()[0], (1.0 - r) / 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(s.eigenvalues()[1], (1.0 + r) / 2.0, epsilon = 1e-10);
            let s = rho_real(r, p).unwrap().eigh().unwrap();
            assert_abs_diff_eq!(s.eigenvalues()[0], (1.0 - r) / 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn real_chart_embeds_in_bloch_ball() {
        for k in 0..12 {
            let theta = 0.1 + k as f64 * 0.5;
            let t = theta.rem_euclid(2.0 * PI);
            let (tp, phi) = if t <= PI { (t, 0.0) } else { (2.0 * PI - t, PI) };
            let a = rho_real(0.7, theta).unwrap();
            let b = rho_complex(0.7, tp, phi).unwrap();
            assert!(close(a.hermitian(), b.hermitian(), 1e-12));
        }
    }

    #[test]
    fn n_equals_one_product_is_base() {
        let p = Product::<f64>::real(1).unwrap();
        let pt = ChartPoint::polar(0.4, 1.3);
        assert!(close(
            p.density(&pt).unwrap().hermitian(),
            RealQubit.density(&pt).unwrap().hermitian(),
            0.0
        ));
        assert!(close(
            &p.derivative(&pt, 1).unwrap(),
            &ParamFamily::<f64>::derivative(&RealQubit, &pt, 1).unwrap(),
            0.0
        ));
    }

    #[test]
    fn arity_and_axis_errors() {
        let pt = ChartPoint::polar(0.4, 1.3);
        assert!(matches!(ComplexQubit.density(&pt), Err(Error::Shape(_))));
        assert!(matches!(
            ParamFamily::<f64>::derivative(&RealQubit, &pt, 2),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            ParamFamily::<f64>::check_interior(&RealQubit, &ChartPoint::polar(1.0, 0.0)),
            Err(Error::Boundary(_))
        ));
        assert!(matches!(Product::<f64>::real(14), Err(Error::Size { .. })));
    }

    #[test]
    fn rejects_non_unitary_conjugation() {
        let base: Arc<dyn ParamFamily<f64>> = Arc::new(RealQubit);
        let m = ComplexMatrix::identity(2).scale(1.1);
        assert!(matches!(Conjugated::new(base, m), Err(Error::Precondition(_))));
    }
}
