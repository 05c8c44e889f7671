use cmx::{ampliated_block_norms, TimeNorm};
use ndarray::Array2;
use processes::{CmxProcess, Letter, Quadruple};

use crate::{integral::integrate, QsiError, Result};

/// Tolerance on norm bounds.
pub const BOUND_SLACK: f64 = 1e-10;
/// Tolerance on adjoint identities.
pub const ADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Gauge,
    Annihilation,
    Creation,
    Time,
}

impl Component {
    fn letter(self) -> Letter {
        match self {
            Component::Gauge => Letter::Gauge,
            Component::Annihilation => Letter::Annihilation,
            Component::Creation => Letter::Creation,
            Component::Time => Letter::Time,
        }
    }
}

/// One block of one component integral against its bound.
#[derive(Debug, Clone, Copy)]
pub struct BlockBound {
    pub component: Component,
    pub i: usize,
    pub j: usize,
    pub norm: f64,
    pub bound: f64,
}

impl BlockBound {
    pub fn pass(&self) -> bool {
        self.norm <= self.bound + BOUND_SLACK
    }
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub m: usize,
    pub blocks: Vec<BlockBound>,
    /// Largest entrywise defect among `M(E)* = M(E*)`, `M(F:dA)* = M(F*:dA†)`,
    /// `M(G:dA†)* = M(G*:dA)`, `M(H)* = M(H*)`.
    pub adjoint_residual: f64,
}

impl BoundsReport {
    pub fn bounds_pass(&self) -> bool {
        self.blocks.iter().all(BlockBound::pass)
    }

    pub fn adjoints_pass(&self) -> bool {
        self.adjoint_residual <= ADJOINT_TOL
    }

    /// Worst `norm - bound`.
    pub fn worst_excess(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm - b.bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn full_norms(p: &CmxProcess, m: usize) -> Array2<f64> {
    let s = p.sample(m);
    ampliated_block_norms(&s.block_norms(), s.n_modes() < p.n_bins())
}

/// Block norms of the four component integrals at `t_m` against
///
/// - `‖M(E:dΛ)^{i+1}_{j+1}‖ ≤ √(i+1) √(j+1) ‖E^i_j‖_∞`
/// - `‖M(F:dA)^i_{j+1}‖ ≤ √(j+1) ‖F^i_j‖_2`
/// - `‖M(G:dA†)^{i+1}_j‖ ≤ √(i+1) ‖G^i_j‖_2`
/// - `‖M(H:ds)^i_j‖ ≤ ‖H^i_j‖_1`
///
/// with time norms over `[0, t_m]`, plus the adjoint identities.
pub fn verify_bounds_adjoints(q: &Quadruple, m: usize) -> Result<BoundsReport> {
    let n = q.grid().n_bins();
    if m > n {
        return Err(QsiError::GridIndex { m, n_bins: n });
    }
    let big_j = q.max_level();
    let mut blocks = vec![];
    let mut adjoint_residual: f64 = 0.0;
    let parts = [
        (Component::Gauge, &q.e, TimeNorm::Sup, Component::Gauge),
        (
            Component::Annihilation,
            &q.f,
            TimeNorm::L2,
            Component::Creation,
        ),
        (
            Component::Creation,
            &q.g,
            TimeNorm::L2,
            Component::Annihilation,
        ),
        (Component::Time, &q.h, TimeNorm::L1, Component::Time),
    ];
    for (comp, x, norm, dual) in parts {
        let integral = integrate(&[(comp.letter(), x)])?;
        let dual_integral = integrate(&[(dual.letter(), &x.adjoint()?)])?;
        adjoint_residual = adjoint_residual.max(integral.adjoint()?.max_abs_diff(&dual_integral)?);
        let got = full_norms(&integral, m);
        let nu = x.scalar_matrix(norm, m)?;
        for i in 0..=big_j {
            for j in 0..=big_j {
                let (src, w) = match comp {
                    Component::Gauge if i >= 1 && j >= 1 => {
                        ((i - 1, j - 1), ((i * j) as f64).sqrt())
                    }
                    Component::Annihilation if j >= 1 => ((i, j - 1), (j as f64).sqrt()),
                    Component::Creation if i >= 1 => ((i - 1, j), (i as f64).sqrt()),
                    Component::Time => ((i, j), 1.0),
                    _ => {
                        // Blocks the integral cannot reach: must vanish.
                        blocks.push(BlockBound {
                            component: comp,
                            i,
                            j,
                            norm: got[[i, j]],
                            bound: 0.0,
                        });
                        continue;
                    }
                };
                let bound = w * nu.get(src.0, src.1);
                blocks.push(BlockBound {
                    component: comp,
                    i,
                    j,
                    norm: got[[i, j]],
                    bound,
                });
            }
        }
    }
    Ok(BoundsReport {
        m,
        blocks,
        adjoint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fock_core::GridConfig;
    use processes::{scenario, ScenarioName};

    #[test]
    fn zero_quadruple_passes() {
        let q = Quadruple::zero(GridConfig::new(3).unwrap(), 3).unwrap();
        let r = verify_bounds_adjoints(&q, 3).unwrap();
        assert!(r.bounds_pass() && r.adjoints_pass());
    }

    #[test]
    fn brownian_creation_norm() {
        // ‖A_t†‖ from level j to j+1 is √(j+1)·√t, which is the bound.
        let grid = GridConfig::new(4).unwrap();
        let q = scenario(&ScenarioName::brownian(), grid, 4)
            .unwrap()
            .quadruple;
        for m in 1..=4 {
            let r = verify_bounds_adjoints(&q, m).unwrap();
            assert!(r.bounds_pass() && r.adjoints_pass());
            let t = grid.time(m);
            for b in r
                .blocks
                .iter()
                .filter(|b| b.component == Component::Creation && b.i == b.j + 1)
            {
                assert!((b.norm - ((b.i as f64) * t).sqrt()).abs() < 1e-10);
                assert!((b.norm - b.bound).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gauge_only_is_tight() {
        // Λ_t has norm j on level j at every t > 0; the bound √j·√j·1 is attained.
        let grid = GridConfig::new(3).unwrap();
        let q = scenario(&ScenarioName::gauge_only(), grid, 3)
            .unwrap()
            .quadruple;
        let r = verify_bounds_adjoints(&q, 2).unwrap();
        assert!(r.bounds_pass());
        for b in r
            .blocks
            .iter()
            .filter(|b| b.component == Component::Gauge && b.i == b.j && b.i > 0)
        {
            assert!((b.norm - b.i as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_band_passes() {
        let grid = GridConfig::new(4).unwrap();
        let name = processes::ScenarioName::KernelBand {
            band: 1,
            xi: 1.0,
            seed: 5,
            gauge: true,
        };
        let q = scenario(&name, grid, 3).unwrap().quadruple;
        for m in 0..=4 {
            let r = verify_bounds_adjoints(&q, m).unwrap();
            assert!(r.bounds_pass(), "m={m} excess {}", r.worst_excess());
            assert!(r.adjoints_pass());
        }
    }
}
