use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error(transparent)]
    Cmx(#[from] cmx::CmxError),
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error("process is not adapted: residual {residual:e} at grid index {m}")]
    NotAdapted { m: usize, residual: f64 },
    #[error("quadruple is not symmetric: residual {0:e}")]
    NotSymmetric(f64),
    #[error("invalid kernel spec: {0}")]
    Kernel(String),
    #[error("word length {len} exceeds the configured depth {depth}")]
    Depth { len: usize, depth: usize },
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
    #[error("mismatched processes: {0}")]
    Mismatch(String),
}
