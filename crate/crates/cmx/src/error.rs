use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmxError {
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error("structural mismatch: {0}")]
    Structure(String),
    #[error("block ({i}, {j}) lies outside the declared band {band}")]
    Band { i: usize, j: usize, band: usize },
    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
    #[error("grid index {m} out of range for {n_bins} bins")]
    GridIndex { m: usize, n_bins: usize },
}
