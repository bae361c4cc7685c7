//! Finite truncations of spin-boson and Pauli-Fierz Hamiltonians, their
//! time-reversal antiunitaries, and numerical checks of Kramers degeneracy
//! and the related semigroup identities.
//!
//! The numerical core is generic over [`scalar::Real`] (`f32` or `f64`).
//! The aliases below fix the scalar to `f64`, which is what the checks and
//! the command-line driver use.

pub mod config;
pub mod error;
pub mod fock;
pub mod operators;
pub mod report;
pub mod run;
pub mod scalar;
pub mod semigroup;
pub mod sparse;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
pub use scalar::Real;

#[allow(non_camel_case_types)]
pub type c64 = num_complex::Complex<f64>;

pub type Mode = fock::Mode<f64>;
pub type ModeSet = fock::ModeSet<f64>;
pub type SparseMatrix = sparse::SparseMatrix<f64>;
pub type HermitianOperator = operators::HermitianOperator<f64>;
pub type FieldOperators = operators::FieldOperators<f64>;
pub type SpinBlockSpec = operators::SpinBlockSpec<f64>;
pub type GridSpec = operators::GridSpec<f64>;
pub type AntiunitaryOperator = symmetry::AntiunitaryOperator<f64>;
pub type SpectralResult = spectral::SpectralResult<f64>;
pub type DegeneracyReport = spectral::DegeneracyReport;
pub type FunctionOfOperator = semigroup::FunctionOfOperator<f64>;


pub use fock::{FockBasis, OccupationState};
pub use symmetry::Involution;

/// Version string embedded in reports.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
