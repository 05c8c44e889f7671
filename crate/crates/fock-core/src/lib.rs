//! Truncated Bose-Fock space over a uniform time grid.
//!
//! The one-particle space is spanned by the normalized bin indicators
//! `χ_k / √dt`, so a Fock state is a superposition of occupation vectors
//! `ν = (ν_0, …, ν_{n-1})` over the bins, truncated at a maximal level `J`.

mod basis;
mod error;
mod grid;
mod ladder;
mod state;

pub use basis::{binomial, enumerate_basis, level_dim, FockBasis, ModeSplit, OccupationIndex};
pub use error::FockError;
pub use grid::{GridConfig, TruncationConfig};
pub use ladder::{mode_ladder, LadderBlock, LadderKind};
pub use state::{buffered_projection, exponential_vector, StateVector};

pub use num_complex::Complex64 as C64;

pub type Result<T> = std::result::Result<T, FockError>;
