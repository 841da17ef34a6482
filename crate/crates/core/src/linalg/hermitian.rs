use num_complex::Complex;

use super::eigen::{eigh, Spectrum};
use super::matrix::ComplexMatrix;
use super::{HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Complex matrix whose entries satisfy `m[i][j] == conj(m[j][i])` to within
/// an absolute per-entry tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        m.check_finite()?;
        let (defect, i, j) = m.hermiticity_defect();
        if defect > lit(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(to_f64(defect), i, j));
        }
        Ok(Self { inner: m })
    }

    /// Returns `(m + m†) / 2`, for products that are Hermitian in exact
    /// arithmetic but carry rounding asymmetry.
    pub fn hermitian_part(m: &ComplexMatrix<T>) -> Self {
        let half = lit::<T>(0.5);
        let n = m.dim();
        Self {
            inner: ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half),
        }
    }

    pub(crate) fn from_trusted(m: ComplexMatrix<T>) -> Self {
        Self { inner: m }
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows)?)
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self {
            inner: ComplexMatrix::diagonal(values),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.inner[(i, j)]
    }

    /// Real trace; the imaginary part of a Hermitian trace is rounding noise.
    pub fn trace(&self) -> T {
        self.inner.trace().re
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_trusted(self.inner.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_trusted(self.inner.add(&other.inner)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_trusted(self.inner.sub(&other.inner)?))
    }

    pub fn eigh(&self) -> Result<Spectrum<T>> {
        eigh(self)
    }

    /// `U m U†` for a unitary `u`.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let p = u.matmul(&self.inner)?.matmul(&u.adjoint())?;
        Ok(Self::hermitian_part(&p))
    }
}

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    inner: HermitianMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates trace and spectrum. Costs one eigendecomposition.
    pub fn new(h: HermitianMatrix<T>) -> Result<Self> {
        let tr = h.trace();
        if (tr - T::one()).abs() > lit(TRACE_TOL) {
            return Err(Error::Trace(to_f64(tr)));
        }
        let spec = h.eigh()?;
        let min = spec.eigenvalues()[0];
        if min < -lit::<T>(PSD_TOL) {
            return Err(Error::NotPsd(to_f64(min)));
        }
        Ok(Self { inner: h })
    }

    pub(crate) fn from_trusted(h: HermitianMatrix<T>) -> Self {
        Self { inner: h }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(HermitianMatrix::identity(dim).scale(T::one() / lit(dim as f64)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.inner
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.inner.matrix()
    }

    pub fn into_hermitian(self) -> HermitianMatrix<T> {
        self.inner
    }

    pub fn eigh(&self) -> Result<Spectrum<T>> {
        self.inner.eigh()
    }
}

impl<T> AsRef<HermitianMatrix<T>> for DensityMatrix<T> {
    fn as_ref(&self) -> &HermitianMatrix<T> {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(vec![
            vec![Complex::new(1.0, 0.0), Complex::new(0.5, 0.1)],
            vec![Complex::new(0.5, 0.1), Complex::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(..))));
    }

    #[test]
    fn density_validation() {
        let bad_trace = HermitianMatrix::diagonal(&[0.6, 0.6]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::Trace(_))));
        let negative = HermitianMatrix::diagonal(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPsd(_))));
        let boundary = HermitianMatrix::diagonal(&[1.0 + 5e-11, -5e-11]);
        assert!(DensityMatrix::new(boundary).is_ok());
    }
}
