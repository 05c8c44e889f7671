//! Exponentials, Duhamel integrands, Fourier functional calculus, operator
//! differentials, the functional quantum Ito formula, Stratonovich midpoint
//! sums and the Duhamel perturbation expansion for chaos matrices.

mod differential;
mod duhamel;
mod error;
mod expansion;
mod functions;
mod ito_formula;
mod kernels;
mod quadrature;
mod spectral;
mod stratonovich;

pub use differential::{
    differential, differential_with, ito_second_differential, ito_second_differential_with,
    polynomial_apply, polynomial_differential, second_differential,
};
pub use duhamel::{
    duhamel_integrands, duhamel_residual, integrand_difference, series_integrands, DuhamelOptions,
    UIntegration, SYMMETRY_TOL,
};
pub use error::CalculusError;
pub use expansion::{duhamel_expansion, DuhamelExpansion};
pub use functions::{Evaluator, FunctionSpec, TAIL_TOL};
pub use ito_formula::{ito_functional_residual, ito_integrands, ItoFormulaOptions};
pub use quadrature::{gauss_legendre_unit, integration_matrix, QuadratureConfig};
pub use spectral::{
    cmx_exp, exp_power_series, fourier_apply, phase_average, spectral_apply, SeriesExp, Spectral,
};
pub use stratonovich::{log_slope, stratonovich_residual, StratonovichRecord};

pub use num_complex::Complex64 as C64;

pub type Result<T> = std::result::Result<T, CalculusError>;

/// Residual of an identity at each grid time, measured in operator norm on
/// the levels `≤ checked_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSeries {
    pub per_time: Vec<f64>,
    /// The same residual on levels `≤ 1` only, where second-order
    /// one-mode terms such as `a_k²` cannot act.
    pub low_levels: Vec<f64>,
    pub effective_buffer: usize,
    pub checked_level: usize,
}

impl ResidualSeries {
    pub fn max(&self) -> f64 {
        self.per_time.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_low(&self) -> f64 {
        self.low_levels.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> f64 {
        self.per_time.last().copied().unwrap_or(0.0)
    }
}
