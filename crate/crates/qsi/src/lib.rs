//! Quantum stochastic integrals of adapted chaos-matrix quadruples on the
//! bin grid, with their norm bounds, adjoint relations, exponential-vector
//! matrix elements, the Ito product formula and the powers recursion.

mod bounds;
mod error;
mod integral;
mod ito;
mod matrix_element;
mod powers;

pub use bounds::{verify_bounds_adjoints, BlockBound, BoundsReport, Component};
pub use error::QsiError;
pub use integral::{
    labeled_integral, past_sample, qs_integral, qs_integral_full, qs_process, IntegralTerm,
    LabeledIntegrand,
};
pub use ito::{ito_product_residual, ito_product_weak_residual, ItoOptions, ItoResidual};
pub use matrix_element::exp_matrix_element;
pub use powers::{power_quadruple, power_recursion_residual, powers_identity_residual};

pub use num_complex::Complex64 as C64;
pub use processes::Letter;

pub type Result<T> = std::result::Result<T, QsiError>;
