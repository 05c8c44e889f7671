use crate::{FockError, Result};

/// Uniform grid on `[0, 1]` with `n_bins` bins. Only `n_bins` is stored so
/// that `dt * n_bins == 1` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridConfig {
    n_bins: usize,
}

impl GridConfig {
    pub fn new(n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(FockError::Config("n_bins must be at least 1".into()));
        }
        Ok(Self { n_bins })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n_bins as f64
    }

    /// Grid time `t_m = m dt`.
    pub fn time(&self, m: usize) -> f64 {
        m as f64 / self.n_bins as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_bins).map(|m| self.time(m)).collect()
    }

    /// Mode amplitudes of the indicator `χ_[0, t_m]`: `√dt` on bins `k < m`.
    pub fn indicator(&self, m: usize) -> Vec<f64> {
        let s = self.dt().sqrt();
        (0..self.n_bins)
            .map(|k| if k < m { s } else { 0.0 })
            .collect()
    }
}

/// Chaos cutoff `J` and the number of top levels `b` excluded from identity
/// checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationConfig {
    max_level: usize,
    buffer: usize,
}

impl TruncationConfig {
    pub fn new(max_level: usize, buffer: usize) -> Result<Self> {
        if buffer > max_level {
            return Err(FockError::Config(format!(
                "buffer {buffer} exceeds max level {max_level}"
            )));
        }
        Ok(Self { max_level, buffer })
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    /// Highest level on which identities are asserted, `J - b`.
    pub fn checked_level(&self) -> usize {
        self.max_level - self.buffer
    }

    /// Same cutoff with a larger buffer; used when an identity involves
    /// products whose band would otherwise reach past the cutoff.
    pub fn with_min_buffer(&self, buffer: usize) -> Self {
        Self {
            max_level: self.max_level,
            buffer: self.buffer.max(buffer).min(self.max_level),
        }
    }
}
