//! Adapted chaos-matrix processes on the time grid: the four basic
//! processes, kernel-defined banded processes, polynomial processes, and the
//! integrand quadruples of the named scenarios.

mod basic;
mod error;
mod kernel;
mod polynomial;
mod process;
mod quadruple;
mod scenario;

pub use basic::{basic_process, identity_process, scalar_process, BasicKind};
pub use error::ProcessError;
pub use kernel::{kernel_process, CoefficientRule, KernelBase, KernelSpec};
pub use polynomial::{polynomial_process, polynomial_quadruple, Letter, PolyExpr, Term};
pub use process::CmxProcess;
pub use quadruple::Quadruple;
pub use scenario::{
    catalog, scenario, KernelParams, ScenarioName, ScenarioOutput, Theta, POLY_DEPTH,
};

pub use num_complex::Complex64 as C64;

pub type Result<T> = std::result::Result<T, ProcessError>;
