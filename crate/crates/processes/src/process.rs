use std::sync::Arc;

use cmx::{
    adaptedness_residual, ampliate, ampliated_block_norms, ChaosMatrix, ScalarMatrix, TimeNorm,
};
use fock_core::{FockBasis, GridConfig};
use ndarray::Array2;

use crate::{ProcessError, Result, C64};

/// Grid-indexed family of chaos matrices, one sample per grid time
/// `t_0, …, t_n`.
///
/// An adapted process stores its sample at `t_m` on the Fock space of the
/// first `m` bins; the full-space sample is its ampliation. A process that
/// is not known to be adapted stores full-space samples.
#[derive(Debug, Clone)]
pub struct CmxProcess {
    grid: GridConfig,
    max_level: usize,
    samples: Vec<Arc<ChaosMatrix>>,
    adapted: bool,
}

impl CmxProcess {
    /// Adapted process from samples with `samples[m]` on `m` modes.
    pub fn from_past_samples(
        grid: GridConfig,
        max_level: usize,
        samples: Vec<ChaosMatrix>,
    ) -> Result<Self> {
        if samples.len() != grid.n_bins() + 1 {
            return Err(ProcessError::Mismatch(format!(
                "{} samples for {} bins",
                samples.len(),
                grid.n_bins()
            )));
        }
        for (m, s) in samples.iter().enumerate() {
            if s.n_modes() != m || s.max_level() != max_level {
                return Err(ProcessError::Mismatch(format!(
                    "sample {m} lives on ({}, {}) instead of ({m}, {max_level})",
                    s.n_modes(),
                    s.max_level()
                )));
            }
        }
        Ok(Self {
            grid,
            max_level,
            samples: samples.into_iter().map(Arc::new).collect(),
            adapted: true,
        })
    }

    /// Process from full-space samples. `adapted` is a claim that
    /// [`CmxProcess::validate_adapted`] checks; it is never trusted.
    pub fn from_full_samples(
        grid: GridConfig,
        max_level: usize,
        samples: Vec<ChaosMatrix>,
        adapted: bool,
    ) -> Result<Self> {
        if samples.len() != grid.n_bins() + 1 {
            return Err(ProcessError::Mismatch(format!(
                "{} samples for {} bins",
                samples.len(),
                grid.n_bins()
            )));
        }
        if samples
            .iter()
            .any(|s| s.n_modes() != grid.n_bins() || s.max_level() != max_level)
        {
            return Err(ProcessError::Mismatch(
                "full samples must live on the full space".into(),
            ));
        }
        Ok(Self {
            grid,
            max_level,
            samples: samples.into_iter().map(Arc::new).collect(),
            adapted,
        })
    }

    pub fn zero(grid: GridConfig, max_level: usize) -> Result<Self> {
        Self::from_fn(grid, max_level, |_, b| {
            Ok(ChaosMatrix::zeros(b.clone(), Some(0)))
        })
    }

    /// Adapted process from a generator called with `(m, past basis)`.
    pub fn from_fn(
        grid: GridConfig,
        max_level: usize,
        f: impl Fn(usize, &Arc<FockBasis>) -> Result<ChaosMatrix>,
    ) -> Result<Self> {
        let samples = (0..=grid.n_bins())
            .map(|m| f(m, &FockBasis::shared(m, max_level)?))
            .collect::<Result<Vec<_>>>()?;
        Self::from_past_samples(grid, max_level, samples)
    }

    pub fn grid(&self) -> GridConfig {
        self.grid
    }

    pub fn n_bins(&self) -> usize {
        self.grid.n_bins()
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Claimed adaptedness (true by construction for past-stored samples).
    pub fn adapted(&self) -> bool {
        self.adapted
    }

    /// Whether samples are stored on past spaces.
    pub fn past_stored(&self) -> bool {
        self.samples
            .iter()
            .enumerate()
            .all(|(m, s)| s.n_modes() == m)
    }

    /// Stored sample at `t_m`.
    pub fn sample(&self, m: usize) -> &ChaosMatrix {
        &self.samples[m]
    }

    /// Sample at `t_m` on `basis`, which must contain the stored modes.
    pub fn sample_on(&self, m: usize, basis: &Arc<FockBasis>) -> Result<ChaosMatrix> {
        let s = &self.samples[m];
        if s.n_modes() > basis.n_modes() {
            return Err(ProcessError::Mismatch(format!(
                "sample {m} needs {} modes, target has {}",
                s.n_modes(),
                basis.n_modes()
            )));
        }
        Ok(ampliate(s, basis)?)
    }

    pub fn sample_full(&self, m: usize) -> Result<ChaosMatrix> {
        self.sample_on(m, &FockBasis::shared(self.n_bins(), self.max_level)?)
    }

    /// Largest adaptedness residual over grid times.
    pub fn validate_adapted(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in 0..=self.n_bins() {
            worst = worst.max(adaptedness_residual(&self.sample_full(m)?, m)?);
        }
        Ok(worst)
    }

    /// Samplewise map preserving the storage layout.
    pub fn map(&self, f: impl Fn(usize, &ChaosMatrix) -> Result<ChaosMatrix>) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(m, s)| f(m, s).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            max_level: self.max_level,
            samples,
            adapted: self.adapted,
        })
    }

    /// Samplewise combination of two processes; samples are ampliated to a
    /// common space first.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ChaosMatrix, &ChaosMatrix) -> cmx::Result<ChaosMatrix>,
    ) -> Result<Self> {
        if self.grid != other.grid || self.max_level != other.max_level {
            return Err(ProcessError::Mismatch(
                "processes on different grids".into(),
            ));
        }
        let samples = (0..=self.n_bins())
            .map(|m| {
                let (a, b) = (&self.samples[m], &other.samples[m]);
                let r = if a.n_modes() == b.n_modes() {
                    f(a, b)?
                } else if a.n_modes() < b.n_modes() {
                    f(&ampliate(a, b.basis())?, b)?
                } else {
                    f(a, &ampliate(b, a.basis())?)?
                };
                Ok(Arc::new(r))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            max_level: self.max_level,
            samples,
            adapted: self.adapted && other.adapted,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    /// Samplewise product `X_t Y_t`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.mul(b))
    }

    pub fn scale(&self, c: C64) -> Result<Self> {
        self.map(|_, s| Ok(s.scale(c)))
    }

    /// Samplewise scaling by a function of the grid time.
    pub fn scale_by(&self, c: impl Fn(f64) -> C64) -> Result<Self> {
        let grid = self.grid;
        self.map(|m, s| Ok(s.scale(c(grid.time(m)))))
    }

    pub fn adjoint(&self) -> Result<Self> {
        self.map(|_, s| Ok(s.adjoint()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.samples.iter().fold(0.0, |m, s| m.max(s.max_abs())))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| s.max_abs() == 0.0)
    }

    /// Largest stored band over the samples.
    pub fn band(&self) -> usize {
        self.samples
            .iter()
            .map(|s| s.stored_band())
            .max()
            .unwrap_or(0)
    }

    /// Block norms of the full-space sample at `t_m`.
    pub fn block_norms(&self, m: usize) -> Array2<f64> {
        let s = &self.samples[m];
        ampliated_block_norms(&s.block_norms(), s.n_modes() < self.n_bins())
    }

    /// Scalar matrix `ν^i_j = ‖X^i_j‖_p` over the bins `k < m`, with the
    /// bin-`k` value taken from the left endpoint `t_k`.
    pub fn scalar_matrix(&self, p: TimeNorm, m: usize) -> Result<ScalarMatrix> {
        let per_bin: Vec<Array2<f64>> = (0..m).map(|k| self.block_norms(k)).collect();
        if per_bin.is_empty() {
            return Ok(ScalarMatrix::zeros(self.max_level + 1));
        }
        Ok(ScalarMatrix::from_block_norms(&per_bin, self.grid.dt(), p)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{basic_process, BasicKind};

    #[test]
    fn storage_layout_checks() {
        let grid = GridConfig::new(3).unwrap();
        let b = FockBasis::shared(3, 2).unwrap();
        let bad = vec![ChaosMatrix::identity(b.clone()); 3];
        assert!(CmxProcess::from_past_samples(grid, 2, bad.clone()).is_err());
        assert!(CmxProcess::from_full_samples(grid, 2, bad, true).is_err());
        let ok = vec![ChaosMatrix::identity(b); 4];
        let p = CmxProcess::from_full_samples(grid, 2, ok, true).unwrap();
        assert!(!p.past_stored());
        assert_eq!(p.validate_adapted().unwrap(), 0.0);
    }

    #[test]
    fn mixed_storage_products() {
        let grid = GridConfig::new(3).unwrap();
        let a = basic_process(grid, 3, BasicKind::Annihilation).unwrap();
        let full = CmxProcess::from_full_samples(
            grid,
            3,
            (0..=3).map(|m| a.sample_full(m).unwrap()).collect(),
            true,
        )
        .unwrap();
        let p1 = a.mul(&a).unwrap();
        let p2 = full.mul(&a).unwrap();
        for m in 0..=3 {
            let d = p1
                .sample_full(m)
                .unwrap()
                .max_abs_diff(&p2.sample_full(m).unwrap())
                .unwrap();
            assert!(d < 1e-14);
        }
    }
}
