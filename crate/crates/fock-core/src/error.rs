use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("basis dimension C({n}+{level}-1, {level}) exceeds the platform integer range")]
    Capacity { n: usize, level: usize },
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("level {level} exceeds the cutoff {max_level}")]
    LevelOutOfRange { level: usize, max_level: usize },
    #[error("split point {m} out of range for {n_modes} modes")]
    SplitOutOfRange { m: usize, n_modes: usize },
    #[error("expected {expected} mode amplitudes, got {got}")]
    AmplitudeLength { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}
