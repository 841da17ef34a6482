#![allow(dead_code)]

use bures_core::linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut impl Rng, dim: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianMatrix<f64> {
    HermitianMatrix::hermitian_part(&ginibre(rng, dim))
}

/// `G G† / tr(G G†)`, full rank with probability one.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix<f64> {
    let g = ginibre(rng, dim);
    let gg = HermitianMatrix::hermitian_part(&g.matmul(&g.adjoint()).unwrap());
    let t = gg.trace();
    DensityMatrix::new(gg.scale(1.0 / t)).unwrap()
}

/// Eigenvector matrix of a random Hermitian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix<f64> {
    random_hermitian(rng, dim).eigh().unwrap().eigenvectors().clone()
}
