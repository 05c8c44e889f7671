use cmx::{control_matrix, ScalarMatrix, TimeNorm};
use fock_core::GridConfig;

use crate::{CmxProcess, ProcessError, Result};

/// Integrands `(E, F, G, H)` against `dΛ, dA, dA†, ds`.
#[derive(Debug, Clone)]
pub struct Quadruple {
    pub e: CmxProcess,
    pub f: CmxProcess,
    pub g: CmxProcess,
    pub h: CmxProcess,
    /// Claim that `E = E*`, `G = F*`, `H = H*`; checked, not trusted.
    pub symmetric: bool,
}

impl Quadruple {
    pub fn new(
        e: CmxProcess,
        f: CmxProcess,
        g: CmxProcess,
        h: CmxProcess,
        symmetric: bool,
    ) -> Result<Self> {
        let grid = e.grid();
        let j = e.max_level();
        for p in [&f, &g, &h] {
            if p.grid() != grid || p.max_level() != j {
                return Err(ProcessError::Mismatch(
                    "quadruple components on different grids".into(),
                ));
            }
        }
        Ok(Self {
            e,
            f,
            g,
            h,
            symmetric,
        })
    }

    pub fn zero(grid: GridConfig, max_level: usize) -> Result<Self> {
        let z = CmxProcess::zero(grid, max_level)?;
        Self::new(z.clone(), z.clone(), z.clone(), z, true)
    }

    pub fn grid(&self) -> GridConfig {
        self.e.grid()
    }

    pub fn max_level(&self) -> usize {
        self.e.max_level()
    }

    pub fn components(&self) -> [&CmxProcess; 4] {
        [&self.e, &self.f, &self.g, &self.h]
    }

    /// `max(‖E - E*‖, ‖G - F*‖, ‖H - H*‖)`, entrywise over all samples.
    pub fn symmetry_residual(&self) -> Result<f64> {
        let a = self.e.max_abs_diff(&self.e.adjoint()?)?;
        let b = self.g.max_abs_diff(&self.f.adjoint()?)?;
        let c = self.h.max_abs_diff(&self.h.adjoint()?)?;
        Ok(a.max(b).max(c))
    }

    /// Largest adaptedness residual over the four components.
    pub fn adaptedness_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in self.components() {
            worst = worst.max(p.validate_adapted()?);
        }
        Ok(worst)
    }

    /// Quadruple of the adjoint integral: `(E*, G*, F*, H*)`.
    pub fn adjoint(&self) -> Result<Self> {
        Self::new(
            self.e.adjoint()?,
            self.g.adjoint()?,
            self.f.adjoint()?,
            self.h.adjoint()?,
            self.symmetric,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.e.add(&other.e)?,
            self.f.add(&other.f)?,
            self.g.add(&other.g)?,
            self.h.add(&other.h)?,
            self.symmetric && other.symmetric,
        )
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        let z = crate::C64::new(c, 0.0);
        Self::new(
            self.e.scale(z)?,
            self.f.scale(z)?,
            self.g.scale(z)?,
            self.h.scale(z)?,
            self.symmetric,
        )
    }

    pub fn gauge_free(&self) -> bool {
        self.e.is_zero()
    }

    /// Control matrix from the integrands on the bins `k < m`.
    pub fn control_matrix(&self, m: usize) -> Result<ScalarMatrix> {
        Ok(control_matrix(
            &self.e.scalar_matrix(TimeNorm::Sup, m)?,
            &self.f.scalar_matrix(TimeNorm::L2, m)?,
            &self.g.scalar_matrix(TimeNorm::L2, m)?,
            &self.h.scalar_matrix(TimeNorm::L1, m)?,
        )?)
    }

    /// Largest stored band among the components.
    pub fn band(&self) -> usize {
        self.components()
            .iter()
            .map(|p| p.band())
            .max()
            .unwrap_or(0)
    }
}
