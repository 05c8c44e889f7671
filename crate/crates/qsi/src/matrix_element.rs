use fock_core::{exponential_vector, FockBasis, StateVector};
use processes::Quadruple;

use crate::{QsiError, Result, C64};

/// Drop the top level of a truncated vector.
fn below_top(psi: &StateVector) -> StateVector {
    let mut out = psi.clone();
    let top = out.max_level();
    out.level_mut(top)
        .iter_mut()
        .for_each(|z| *z = C64::new(0.0, 0.0));
    out
}

/// `⟨M_{t_m} e(f), e(g)⟩` from the integrand matrix elements:
///
/// `Σ_{k<m} ⟨(conj(g_k) f_k E_k + √dt f_k F_k + √dt conj(g_k) G_k + dt H_k) e(f), e(g)⟩`,
///
/// with `f_k`, `g_k` the per-bin amplitudes (so `f(s) = f_k/√dt` on bin `k`).
/// On the truncated space `a_k e(f)` is `f_k` times `e(f)` cut one level
/// lower, which the formula reproduces by dropping the top level where an
/// annihilator acted.
pub fn exp_matrix_element(q: &Quadruple, m: usize, f: &[C64], g: &[C64]) -> Result<C64> {
    let n = q.grid().n_bins();
    if m > n {
        return Err(QsiError::GridIndex { m, n_bins: n });
    }
    for v in [f, g] {
        if v.len() != n {
            return Err(QsiError::Amplitudes {
                got: v.len(),
                expected: n,
            });
        }
    }
    let basis = FockBasis::shared(n, q.max_level())?;
    let ef = exponential_vector(&basis, f)?;
    let eg = exponential_vector(&basis, g)?;
    let (ef_low, eg_low) = (below_top(&ef), below_top(&eg));
    let sdt = q.grid().dt().sqrt();
    let mut total = C64::new(0.0, 0.0);
    for k in 0..m {
        let (fk, gk) = (f[k], g[k].conj());
        if !q.e.is_zero() {
            total += gk * fk * q.e.sample_full(k)?.apply(&ef_low).inner(&eg_low);
        }
        if !q.f.is_zero() {
            total += sdt * fk * q.f.sample_full(k)?.apply(&ef_low).inner(&eg);
        }
        if !q.g.is_zero() {
            total += sdt * gk * q.g.sample_full(k)?.apply(&ef).inner(&eg_low);
        }
        if !q.h.is_zero() {
            total += q.grid().dt() * q.h.sample_full(k)?.apply(&ef).inner(&eg);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qs_integral_full;
    use fock_core::GridConfig;
    use processes::{scenario, ScenarioName};

    fn amps(n: usize, a: f64, b: f64) -> Vec<C64> {
        (0..n)
            .map(|k| C64::new(a * (k as f64 + 1.0).sin(), b * (0.5 * k as f64).cos()))
            .collect()
    }

    #[test]
    fn zero_quadruple_gives_zero() {
        let g = GridConfig::new(3).unwrap();
        let q = Quadruple::zero(g, 3).unwrap();
        assert_eq!(
            exp_matrix_element(&q, 3, &amps(3, 0.3, 0.1), &amps(3, 0.2, 0.4)).unwrap(),
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn brownian_vacuum_elements() {
        let grid = GridConfig::new(4).unwrap();
        let q = scenario(&ScenarioName::brownian(), grid, 3)
            .unwrap()
            .quadruple;
        let z = vec![C64::new(0.0, 0.0); 4];
        assert_eq!(exp_matrix_element(&q, 4, &z, &z).unwrap().norm(), 0.0);
        // ⟨A_t† vac, e(g)⟩ = conj(Σ_{k<m} √dt g_k).
        let g = amps(4, 0.4, -0.3);
        for m in 0..=4 {
            let want: C64 = (0..m).map(|k| grid.dt().sqrt() * g[k]).sum::<C64>().conj();
            assert!((exp_matrix_element(&q, m, &z, &g).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn agrees_with_integral_on_kernel_scenario() {
        let grid = GridConfig::new(3).unwrap();
        let name = ScenarioName::KernelBand {
            band: 1,
            xi: 1.0,
            seed: 4,
            gauge: true,
        };
        let q = scenario(&name, grid, 3).unwrap().quadruple;
        let (f, g) = (amps(3, 0.5, 0.2), amps(3, -0.3, 0.6));
        let basis = FockBasis::shared(3, 3).unwrap();
        let (ef, eg) = (
            exponential_vector(&basis, &f).unwrap(),
            exponential_vector(&basis, &g).unwrap(),
        );
        for m in 0..=3 {
            let lhs = qs_integral_full(&q, m).unwrap().apply(&ef).inner(&eg);
            let rhs = exp_matrix_element(&q, m, &f, &g).unwrap();
            assert!((lhs - rhs).norm() < 1e-12, "m={m}: {lhs} vs {rhs}");
        }
    }
}
