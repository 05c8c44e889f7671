use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error(transparent)]
    Cmx(#[from] cmx::CmxError),
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error(transparent)]
    Qsi(#[from] qsi::QsiError),
    #[error(transparent)]
    Process(#[from] processes::ProcessError),
    #[error("operator is not Hermitian: defect {0:e}")]
    NotHermitian(f64),
    #[error("quadruple is not symmetric: residual {0:e}")]
    NotSymmetric(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("quadruple has a gauge part; use the Duhamel route for the general formula")]
    GaugePresent,
    #[error("capacity: identity needs buffer {needed} but the cutoff is {max_level}")]
    Capacity { needed: usize, max_level: usize },
}
