use std::sync::Arc;

use cmx::{ampliate, past_compression, ChaosMatrix, ADAPTED_PASS};
use fock_core::{FockBasis, LadderKind};
use processes::{CmxProcess, Letter, Quadruple};

use crate::{QsiError, Result, C64};

/// An integrand together with its integrator `dA^α_β`.
#[derive(Debug, Clone)]
pub struct LabeledIntegrand {
    pub process: CmxProcess,
    pub label: Letter,
}

impl LabeledIntegrand {
    pub fn new(process: CmxProcess, label: Letter) -> Self {
        Self { process, label }
    }

    /// Band of the integral: integrand band plus one for `dA`, `dA†`.
    pub fn integral_band(&self) -> usize {
        let (a, b) = self.label.label();
        self.process.band() + usize::from(a != b)
    }
}

/// Borrowed `(integrator, integrand)` pair.
pub type IntegralTerm<'a> = (Letter, &'a CmxProcess);

/// Sample of an adapted process at `t_k` on the first `k` modes.
pub fn past_sample(p: &CmxProcess, k: usize) -> Result<ChaosMatrix> {
    let s = p.sample(k);
    if s.n_modes() <= k {
        Ok(ampliate(s, &FockBasis::shared(k, p.max_level())?)?)
    } else {
        Ok(past_compression(s, k)?)
    }
}

fn check_adapted(p: &CmxProcess) -> Result<()> {
    if p.past_stored() {
        return Ok(());
    }
    let r = p.validate_adapted()?;
    if r > ADAPTED_PASS {
        return Err(QsiError::NotAdapted(r));
    }
    Ok(())
}

/// Increment of `∫ X dA^α_β` over bin `k`, on the first `k + 1` modes:
/// `a_k† X a_k`, `√dt X a_k`, `√dt a_k† X` or `dt X`, with `X` sampled at
/// the left endpoint.
pub(crate) fn increment(
    label: Letter,
    x: &CmxProcess,
    k: usize,
    basis: &Arc<FockBasis>,
) -> Result<ChaosMatrix> {
    let dt = x.grid().dt();
    let xk = ampliate(&past_sample(x, k)?, basis)?;
    Ok(match label {
        Letter::Gauge => {
            let right = cmx::ladder_right(&xk, LadderKind::Annihilate, k)?;
            cmx::ladder_left(LadderKind::Create, k, &right)?
        }
        Letter::Annihilation => {
            cmx::ladder_right(&xk, LadderKind::Annihilate, k)?.scale_real(dt.sqrt())
        }
        Letter::Creation => cmx::ladder_left(LadderKind::Create, k, &xk)?.scale_real(dt.sqrt()),
        Letter::Time => xk.scale_real(dt),
    })
}

/// All prefixes `M_{t_0}, …, M_{t_n}` of `Σ_terms ∫ X dA^α_β`, accumulated
/// bin by bin; `M_{t_m}` is stored on the first `m` modes.
pub fn integrate(terms: &[IntegralTerm<'_>]) -> Result<CmxProcess> {
    let Some((_, first)) = terms.first() else {
        return Err(processes::ProcessError::Mismatch("no integrands".into()).into());
    };
    let (grid, big_j) = (first.grid(), first.max_level());
    for (_, p) in terms {
        if p.grid() != grid || p.max_level() != big_j {
            return Err(
                processes::ProcessError::Mismatch("integrands on different grids".into()).into(),
            );
        }
        check_adapted(p)?;
    }
    let nz: Vec<_> = terms.iter().filter(|(_, p)| !p.is_zero()).collect();
    let mut samples = Vec::with_capacity(grid.n_bins() + 1);
    let mut acc = ChaosMatrix::zeros(FockBasis::shared(0, big_j)?, Some(0));
    samples.push(acc.clone());
    for k in 0..grid.n_bins() {
        let basis = FockBasis::shared(k + 1, big_j)?;
        let mut next = ampliate(&acc, &basis)?;
        for (label, p) in &nz {
            next.add_scaled(C64::new(1.0, 0.0), &increment(*label, p, k, &basis)?)?;
        }
        next.prune();
        samples.push(next.clone());
        acc = next;
    }
    Ok(CmxProcess::from_past_samples(grid, big_j, samples)?)
}

/// `t ↦ ∫_0^t (E dΛ + F dA + G dA† + H ds)` at every grid time.
pub fn qs_process(q: &Quadruple) -> Result<CmxProcess> {
    integrate(&[
        (Letter::Gauge, &q.e),
        (Letter::Annihilation, &q.f),
        (Letter::Creation, &q.g),
        (Letter::Time, &q.h),
    ])
}

/// `∫ X dA^α_β` at every grid time.
pub fn labeled_integral(x: &LabeledIntegrand) -> Result<CmxProcess> {
    integrate(&[(x.label, &x.process)])
}

/// `M_{t_m}` on the first `m` modes.
pub fn qs_integral(q: &Quadruple, m: usize) -> Result<ChaosMatrix> {
    check_index(q, m)?;
    Ok(qs_process(q)?.sample(m).clone())
}

/// `M_{t_m}` on the full grid space.
pub fn qs_integral_full(q: &Quadruple, m: usize) -> Result<ChaosMatrix> {
    check_index(q, m)?;
    Ok(qs_process(q)?.sample_full(m)?)
}

fn check_index(q: &Quadruple, m: usize) -> Result<()> {
    let n = q.grid().n_bins();
    if m > n {
        return Err(QsiError::GridIndex { m, n_bins: n });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmx::adaptedness_residual;
    use fock_core::GridConfig;
    use processes::{basic_process, identity_process, scenario, BasicKind, ScenarioName};

    fn grid(n: usize) -> GridConfig {
        GridConfig::new(n).unwrap()
    }

    #[test]
    fn brownian_integrates_to_a_plus_a_dagger() {
        let out = scenario(&ScenarioName::brownian(), grid(4), 3).unwrap();
        let m = qs_process(&out.quadruple).unwrap();
        assert!(m.max_abs_diff(&out.reference.unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn time_integral_of_identity() {
        let g = grid(5);
        let z = CmxProcess::zero(g, 2).unwrap();
        let id = identity_process(g, 2).unwrap();
        let q = Quadruple::new(z.clone(), z.clone(), z, id, true).unwrap();
        let t = basic_process(g, 2, BasicKind::Time).unwrap();
        assert!(qs_process(&q).unwrap().max_abs_diff(&t).unwrap() < 1e-15);
    }

    #[test]
    fn gauge_integral_of_identity_is_number_process() {
        let g = grid(4);
        let id = identity_process(g, 3).unwrap();
        let lam = labeled_integral(&LabeledIntegrand::new(id, Letter::Gauge)).unwrap();
        let direct = basic_process(g, 3, BasicKind::Gauge).unwrap();
        let d = lam.max_abs_diff(&direct).unwrap();
        assert!(d < 1e-14, "{d:e}");
    }

    #[test]
    fn zero_at_start_and_adapted_throughout() {
        let out = scenario(&ScenarioName::kernel_band(1, 1.0, 3), grid(4), 3).unwrap();
        let m = qs_process(&out.quadruple).unwrap();
        assert_eq!(m.sample(0).max_abs(), 0.0);
        for k in 0..=4 {
            assert!(adaptedness_residual(&m.sample_full(k).unwrap(), k).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn non_adapted_integrand_is_rejected() {
        let g = grid(3);
        let b = FockBasis::shared(3, 2).unwrap();
        // a_2 at every time: supported on the future of t_0, t_1, t_2.
        let a2 = cmx::annihilator(&b, 2).unwrap();
        let p = CmxProcess::from_full_samples(g, 2, vec![a2; 4], true).unwrap();
        let r = labeled_integral(&LabeledIntegrand::new(p, Letter::Time));
        assert!(matches!(r, Err(QsiError::NotAdapted(x)) if x >= 1e-3));
    }

    #[test]
    fn full_stored_adapted_integrand_matches_past_stored() {
        let g = grid(3);
        let a = basic_process(g, 3, BasicKind::Annihilation).unwrap();
        let full = CmxProcess::from_full_samples(
            g,
            3,
            (0..=3).map(|m| a.sample_full(m).unwrap()).collect(),
            true,
        )
        .unwrap();
        let i1 = labeled_integral(&LabeledIntegrand::new(a, Letter::Creation)).unwrap();
        let i2 = labeled_integral(&LabeledIntegrand::new(full, Letter::Creation)).unwrap();
        assert!(i1.max_abs_diff(&i2).unwrap() < 1e-15);
    }

    #[test]
    fn symmetric_quadruple_gives_hermitian_integral() {
        for name in [
            ScenarioName::kernel_band(1, 1.0, 9),
            ScenarioName::Rotated {
                theta: Default::default(),
            },
        ] {
            let q = scenario(&name, grid(4), 3).unwrap().quadruple;
            let m = qs_process(&q).unwrap();
            for k in 0..=4 {
                assert!(m.sample(k).hermitian_defect() <= 1e-12);
            }
        }
    }
}
