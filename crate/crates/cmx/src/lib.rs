//! Chaos matrices: block operators `[T^i_j]` between the chaos levels of a
//! truncated Fock space, with their algebra, ladder actions, ampliation,
//! adaptedness test and scalar (norm) matrices.

extern crate blas_src;

mod ampliate;
mod error;
mod gradient;
mod ladder;
pub mod linalg;
mod matrix;
mod scalar;

pub use ampliate::{adaptedness_residual, ampliate, ampliated_block_norms, past_compression};
pub use error::CmxError;
pub use gradient::GradientStack;
pub use ladder::{annihilator, creator, ladder_left, ladder_right, number};
pub use matrix::ChaosMatrix;
pub use scalar::{
    analytic_radius_estimate, control_matrix, Radius, RadiusEstimate, ScalarMatrix, TimeNorm,
};

pub use fock_core::{FockBasis, LadderKind};
pub use num_complex::Complex64 as C64;

pub type Result<T> = std::result::Result<T, CmxError>;

/// Adaptedness residuals at or below this count as exact.
pub const ADAPTED_PASS: f64 = 1e-12;
/// Adaptedness residuals at or above this count as a violation; values in
/// between are inconclusive.
pub const ADAPTED_FAIL: f64 = 1e-3;
