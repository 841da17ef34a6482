//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry, then applies a
//! real Givens rotation, so the accumulated transform stays exactly unitary
//! up to rounding. Jacobi is slower than tridiagonal QR but keeps small
//! eigenvalues to high relative accuracy, which the Bures sums depend on.

use num_complex::Complex;

use super::hermitian::HermitianMatrix;
use super::matrix::ComplexMatrix;
use super::DEGENERACY_GAP;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
    eigenvectors: ComplexMatrix<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix<T> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = ComplexMatrix::from_fn(n, |i, j| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &w) in fl.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * w;
            }
            acc
        });
        HermitianMatrix::hermitian_part(&m)
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.map(|l| l)
    }

    /// `V† m V`: expresses `m` in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.eigenvectors
            .adjoint()
            .matmul(m)?
            .matmul(&self.eigenvectors)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eigh<T: Scalar>(m: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    let n = m.dim();
    let mut a = HermitianMatrix::hermitian_part(m.matrix()).into_matrix();
    let mut v = ComplexMatrix::<T>::identity(n);

    let eps = T::epsilon();
    let floor = eps * eps * a.frobenius_norm();
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotated |= rotate(&mut a, &mut v, p, q, eps, floor);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { dim: n });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<T> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    orthonormalize_clusters(&eigenvalues, &mut eigenvectors);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilates `a[p][q]`. Returns false when the entry is already negligible
/// relative to its diagonal pair, in which case it is zeroed in place.
fn rotate<T: Scalar>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    eps: T,
    floor: T,
) -> bool {
    let apq = a[(p, q)];
    let mag = apq.norm();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= floor || mag <= eps * (app.abs() * aqq.abs()).sqrt() {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return false;
    }
    let two = lit::<T>(2.0);
    let theta = (aqq - app) / (two * mag);
    let t = if theta >= T::zero() {
        T::one() / (theta + (theta * theta + T::one()).sqrt())
    } else {
        -T::one() / (-theta + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    // phase factor e^{-i arg(a_pq)}
    let phase = apq.conj() / mag;

    // U restricted to the (p, q) plane:
    // [[c, s], [-s * phase, c * phase]]
    let upp = Complex::new(c, T::zero());
    let upq = Complex::new(s, T::zero());
    let uqp = phase * (-s);
    let uqq = phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
    true
}

/// Modified Gram-Schmidt inside each cluster of (near-)degenerate
/// eigenvalues. A cluster is a maximal run with consecutive gaps below
/// `DEGENERACY_GAP * max|λ|`.
fn orthonormalize_clusters<T: Scalar>(eigenvalues: &[T], vectors: &mut ComplexMatrix<T>) {
    let n = eigenvalues.len();
    if n == 0 {
        return;
    }
    let scale = eigenvalues
        .iter()
        .fold(T::zero(), |m, &l| m.max(l.abs()));
    let gap = lit::<T>(DEGENERACY_GAP) * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            modified_gram_schmidt(vectors, start, end);
        }
        start = end;
    }
}

fn modified_gram_schmidt<T: Scalar>(vectors: &mut ComplexMatrix<T>, start: usize, end: usize) {
    let n = vectors.dim();
    for j in start..end {
        for k in start..j {
            let mut dot = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                dot += vectors[(i, k)].conj() * vectors[(i, j)];
            }
            for i in 0..n {
                let vk = vectors[(i, k)];
                vectors[(i, j)] -= vk * dot;
            }
        }
        let norm = (0..n)
            .map(|i| vectors[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if norm > T::zero() {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
}
