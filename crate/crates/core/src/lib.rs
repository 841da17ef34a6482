//! Bures metrics, distances, curvatures and prior volume elements for
//! parameterized families of qubit density matrices and their tensor powers.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what every tolerance in the
//! crate is calibrated for.

pub mod bures;
pub mod ensemble;
pub mod error;
pub mod families;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type HermitianMatrix64 = linalg::HermitianMatrix<f64>;
pub type DensityMatrix64 = linalg::DensityMatrix<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type ChartPoint64 = families::ChartPoint<f64>;
pub type EnsembleSpec64 = ensemble::EnsembleSpec<f64>;
pub type MetricTensor64 = bures::MetricTensor<f64>;
pub type BuresDistance64 = bures::BuresDistance<f64>;
pub type MetricField64 = geometry::MetricField<f64>;
pub type PriorDensity64 = geometry::PriorDensity<f64>;

pub type DensityMatrix32 = linalg::DensityMatrix<f32>;
pub type HermitianMatrix32 = linalg::HermitianMatrix<f32>;
pub type ChartPoint32 = families::ChartPoint<f32>;
pub type EnsembleSpec32 = ensemble::EnsembleSpec<f32>;
