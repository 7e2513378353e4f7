//! Dense linear algebra used throughout the crate.
//!
//! Everything here works on small-to-medium dense matrices stored row-major.
//! The routines are generic over [`Scalar`] so the same Hermitian
//! eigensolver and Cholesky factorization serve both the complex Hermite
//! matrices and the realified blocks of the interior-point solver.

mod cholesky;
mod dense;
mod eig;
mod hermitian;
mod roots;

pub use cholesky::{cholesky, lu_determinant, lu_solve, Cholesky, LuFactor, NotPositiveDefinite};
pub use dense::{ComplexMatrix, Matrix, RealMatrix, Scalar};
pub use eig::{eigenvalues, eigenvalues_in_place, spectral_radius, EigenWorkspace};
pub use hermitian::{hermitian_eigs, hermitian_min_eigpair, symmetric_eigenvalues, HermitianEigen};
pub use roots::roots_via_companion;

pub use num_complex::Complex64;

/// Numerical tolerances shared by the linear-algebra kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entrywise asymmetry `|A - Aᴴ|` accepted by the Hermitian paths,
    /// relative to `1 + max|A|`.
    pub hermitian: f64,
    /// QR sweeps allowed per matrix dimension before giving up.
    pub sweeps_per_dim: usize,
    /// Relative deflation threshold used by the QR iterations.
    pub deflation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            sweeps_per_dim: 30,
            deflation: f64::EPSILON,
        }
    }
}

pub(crate) fn hypot(a: f64, b: f64) -> f64 {
    a.hypot(b)
}
