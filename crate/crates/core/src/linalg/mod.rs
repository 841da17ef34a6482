//! Dense complex Hermitian linear algebra.

mod eigen;
mod hermitian;
mod matrix;

pub use eigen::{eigh, Spectrum};
pub use hermitian::{DensityMatrix, HermitianMatrix};
pub use matrix::ComplexMatrix;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Absolute per-entry Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero.
pub const PSD_TOL: f64 = 1e-10;
/// Relative gap below which neighbouring eigenvalues form one cluster.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Default largest dimension a Kronecker product may produce.
pub const DEFAULT_MAX_DIM: usize = 1 << 13;

/// Kronecker product, capped at [`DEFAULT_MAX_DIM`].
pub fn kron<T: Scalar>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    kron_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_capped<T: Scalar>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    max_dim: usize,
) -> Result<HermitianMatrix<T>> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .ok_or(Error::Size { dim: usize::MAX, cap: max_dim })?;
    if dim > max_dim {
        return Err(Error::Size { dim, cap: max_dim });
    }
    Ok(HermitianMatrix::from_trusted(
        a.matrix().kron_unchecked(b.matrix()),
    ))
}

/// `n`-fold Kronecker power of a density matrix.
pub fn tensor_power<T: Scalar>(rho: &DensityMatrix<T>, n: usize) -> Result<DensityMatrix<T>> {
    tensor_power_capped(rho, n, DEFAULT_MAX_DIM)
}

pub fn tensor_power_capped<T: Scalar>(
    rho: &DensityMatrix<T>,
    n: usize,
    max_dim: usize,
) -> Result<DensityMatrix<T>> {
    if n == 0 {
        return Err(Error::Domain("tensor power needs n >= 1".into()));
    }
    check_power_dim(rho.dim(), n, max_dim)?;
    let mut acc = rho.hermitian().clone();
    for _ in 1..n {
        acc = kron_capped(&acc, rho.hermitian(), max_dim)?;
    }
    Ok(DensityMatrix::from_trusted(acc))
}

pub(crate) fn check_power_dim(base: usize, n: usize, max_dim: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(base)
            .filter(|&d| d <= max_dim)
            .ok_or(Error::Size {
                dim: dim.saturating_mul(base),
                cap: max_dim,
            })?;
    }
    Ok(dim)
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything more
/// negative is rejected.
pub fn sqrtm_psd<T: Scalar>(m: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let spec = m.eigh()?;
    let min = spec.eigenvalues()[0];
    if min < -lit::<T>(PSD_TOL) {
        return Err(Error::NotPsd(to_f64(min)));
    }
    Ok(spec.map(|l| l.max(T::zero()).sqrt()))
}
