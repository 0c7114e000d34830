//! Dense complex linear algebra and quadrature kernels.
//!
//! Everything here is small and self-contained: a cyclic Jacobi solver for
//! Hermitian matrices, a one-sided Jacobi SVD, Householder least squares, a
//! shifted-QR eigenvalue routine for the small non-Hermitian matrices that
//! appear in the matrix-pencil method, and adaptive Simpson quadrature with a
//! symmetric-pair principal-value rule.

mod eig;
mod eigh;
mod lstsq;
mod matrix;
mod pencil;
mod quad;
mod svd;

pub use eig::eigenvalues;
pub use eigh::{eigh, EigenDecomposition};
pub use lstsq::lstsq;
pub use matrix::{CMatrix, HermitianMatrix, HERMITIAN_TOL};
pub use pencil::{matrix_pencil_fit, numerical_rank, ExpMode, PencilFit};
pub use quad::{adaptive_simpson, principal_value_integral, PV_TOL};
pub use svd::{svd, Svd};

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Re-exported so downstream `no_std` code can call `exp`, `sqrt`, ... on `f64`.
pub use num_traits::Float;

#[allow(dead_code)]
pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub(crate) fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u, v⟩ = Σ conj(uᵢ)·vᵢ`.
pub fn inner(u: &[Complex], v: &[Complex]) -> Complex {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
