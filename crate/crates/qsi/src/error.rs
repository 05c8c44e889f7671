use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsiError {
    #[error(transparent)]
    Cmx(#[from] cmx::CmxError),
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error(transparent)]
    Process(#[from] processes::ProcessError),
    #[error("integrand is not adapted: residual {0:e}")]
    NotAdapted(f64),
    #[error("quadruple is not symmetric: residual {0:e}")]
    NotSymmetric(f64),
    #[error("grid index {m} beyond {n_bins} bins")]
    GridIndex { m: usize, n_bins: usize },
    #[error("capacity: identity needs buffer {needed} but only levels up to {max_level} exist")]
    Capacity { needed: usize, max_level: usize },
    #[error("amplitude sequence of length {got}, expected {expected}")]
    Amplitudes { got: usize, expected: usize },
}
