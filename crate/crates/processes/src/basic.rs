use cmx::{annihilator, number, ChaosMatrix};
use fock_core::GridConfig;

use crate::{CmxProcess, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicKind {
    /// `Λ_t = Σ_{k<m} n_k`
    Gauge,
    /// `A_t = √dt Σ_{k<m} a_k`
    Annihilation,
    /// `A_t† = √dt Σ_{k<m} a_k†`
    Creation,
    /// `t I`
    Time,
}

pub fn basic_process(grid: GridConfig, max_level: usize, kind: BasicKind) -> Result<CmxProcess> {
    let sdt = grid.dt().sqrt();
    CmxProcess::from_fn(grid, max_level, |m, b| {
        let band = if matches!(kind, BasicKind::Gauge | BasicKind::Time) {
            0
        } else {
            1
        };
        let mut t = ChaosMatrix::zeros(b.clone(), Some(band));
        match kind {
            BasicKind::Gauge => {
                for k in 0..m {
                    t.add_scaled(C64::new(1.0, 0.0), &number(b, k)?)?;
                }
            }
            BasicKind::Annihilation | BasicKind::Creation => {
                for k in 0..m {
                    t.add_scaled(C64::new(sdt, 0.0), &annihilator(b, k)?)?;
                }
                if kind == BasicKind::Creation {
                    t = t.adjoint();
                }
            }
            BasicKind::Time => t = ChaosMatrix::scalar(b.clone(), C64::new(grid.time(m), 0.0)),
        }
        Ok(t)
    })
}

pub fn identity_process(grid: GridConfig, max_level: usize) -> Result<CmxProcess> {
    scalar_process(grid, max_level, |_| C64::new(1.0, 0.0))
}

/// `c(t) I`.
pub fn scalar_process(
    grid: GridConfig,
    max_level: usize,
    c: impl Fn(f64) -> C64,
) -> Result<CmxProcess> {
    CmxProcess::from_fn(grid, max_level, |m, b| {
        Ok(ChaosMatrix::scalar(b.clone(), c(grid.time(m))))
    })
}
