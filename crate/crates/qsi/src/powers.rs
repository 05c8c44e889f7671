use cmx::ChaosMatrix;
use processes::{CmxProcess, Quadruple};

use crate::integral::past_sample;
use crate::{qs_process, QsiError, Result, C64};

fn pow_table(x: &ChaosMatrix, n: usize) -> Result<Vec<ChaosMatrix>> {
    let mut out = vec![ChaosMatrix::identity(x.basis().clone())];
    for _ in 0..n {
        let next = out.last().expect("nonempty").mul(x)?;
        out.push(next);
    }
    Ok(out)
}

fn sum(
    terms: impl IntoIterator<Item = Result<ChaosMatrix>>,
    basis: &ChaosMatrix,
) -> Result<ChaosMatrix> {
    let mut acc = ChaosMatrix::zeros(basis.basis().clone(), None);
    for t in terms {
        acc.add_scaled(C64::new(1.0, 0.0), &t?)?;
    }
    acc.prune();
    Ok(acc)
}

/// Integrands of `M^n` for `M = ∫(E, F, G, H)`, with `N = M + E`:
///
/// - `E_n = N^n - M^n`
/// - `F_n = Σ_{α+β=n-1} M^α F N^β`, `G_n = Σ_{α+β=n-1} N^β G M^α`
/// - `H_n = Σ_{α+β=n-1} M^α H M^β + Σ_{α+β+γ=n-2} M^α F N^β G M^γ`
///
/// built samplewise on past spaces. For symmetric `Q`, `G_n = F_n*`.
pub fn power_quadruple(q: &Quadruple, n: usize) -> Result<Quadruple> {
    if n == 0 {
        return Err(QsiError::Capacity {
            needed: 0,
            max_level: q.max_level(),
        });
    }
    if n == 1 {
        return Ok(q.clone());
    }
    let m = qs_process(q)?;
    let (grid, big_j) = (q.grid(), q.max_level());
    let mut comps: [Vec<ChaosMatrix>; 4] = Default::default();
    for k in 0..=grid.n_bins() {
        let mk = past_sample(&m, k)?;
        let (e, f, g, h) = (
            past_sample(&q.e, k)?,
            past_sample(&q.f, k)?,
            past_sample(&q.g, k)?,
            past_sample(&q.h, k)?,
        );
        let mp = pow_table(&mk, n)?;
        let np = pow_table(&mk.add(&e)?, n)?;
        let en = np[n].sub(&mp[n])?;
        let fm = |a: usize, b: usize| -> Result<ChaosMatrix> { Ok(mp[a].mul(&f)?.mul(&np[b])?) };
        let fn_ = sum((0..n).map(|a| fm(a, n - 1 - a)), &mk)?;
        let gn = sum((0..n).map(|a| Ok(np[n - 1 - a].mul(&g)?.mul(&mp[a])?)), &mk)?;
        let mut hn = sum((0..n).map(|a| Ok(mp[a].mul(&h)?.mul(&mp[n - 1 - a])?)), &mk)?;
        for a in 0..=n - 2 {
            for b in 0..=n - 2 - a {
                let c = n - 2 - a - b;
                hn.add_scaled(C64::new(1.0, 0.0), &fm(a, b)?.mul(&g)?.mul(&mp[c])?)?;
            }
        }
        for (slot, x) in comps.iter_mut().zip([en, fn_, gn, hn]) {
            slot.push(x);
        }
    }
    let [e, f, g, h] = comps.map(|s| CmxProcess::from_past_samples(grid, big_j, s));
    Ok(Quadruple::new(e?, f?, g?, h?, q.symmetric)?)
}

fn effective_buffer(m: &CmxProcess, products: usize, buffer: usize) -> Result<usize> {
    let b = buffer.max(products * m.band());
    if b > m.max_level() {
        return Err(QsiError::Capacity {
            needed: b,
            max_level: m.max_level(),
        });
    }
    Ok(b)
}

/// Largest defect of the recursions
/// `E_{n+1} = M E_n + E M^n + E E_n`, `F_{n+1} = M F_n + F M^n + F E_n`,
/// `G_{n+1} = M G_n + G M^n + E G_n`, `H_{n+1} = M H_n + H M^n + F G_n`
/// over all grid times, on levels `≤ J - b`.
pub fn power_recursion_residual(q: &Quadruple, n: usize, buffer: usize) -> Result<f64> {
    let m = qs_process(q)?;
    let b = effective_buffer(&m, n, buffer)?;
    let level = q.max_level() - b;
    let qn = power_quadruple(q, n)?;
    let qn1 = power_quadruple(q, n + 1)?;
    let mut worst: f64 = 0.0;
    for k in 0..=q.grid().n_bins() {
        let s = |p: &CmxProcess| past_sample(p, k);
        let (mk, e, f, g, h) = (s(&m)?, s(&q.e)?, s(&q.f)?, s(&q.g)?, s(&q.h)?);
        let mn = pow_table(&mk, n)?.pop().expect("nonempty");
        let (en, fnn, gn, hn) = (s(&qn.e)?, s(&qn.f)?, s(&qn.g)?, s(&qn.h)?);
        let checks = [
            (
                s(&qn1.e)?,
                mk.mul(&en)?.add(&e.mul(&mn)?)?.add(&e.mul(&en)?)?,
            ),
            (
                s(&qn1.f)?,
                mk.mul(&fnn)?.add(&f.mul(&mn)?)?.add(&f.mul(&en)?)?,
            ),
            (
                s(&qn1.g)?,
                mk.mul(&gn)?.add(&g.mul(&mn)?)?.add(&e.mul(&gn)?)?,
            ),
            (
                s(&qn1.h)?,
                mk.mul(&hn)?.add(&h.mul(&mn)?)?.add(&f.mul(&gn)?)?,
            ),
        ];
        for (lhs, rhs) in checks {
            worst = worst.max(lhs.compress(level).max_abs_diff(&rhs.compress(level))?);
        }
    }
    Ok(worst)
}

/// `‖∫ power_quadruple(Q, n) - M^n‖` at each grid time, on levels
/// `≤ J - b` with `b ≥ (n-1)·band(M)`. Returns per-time residuals and `b`.
pub fn powers_identity_residual(
    q: &Quadruple,
    n: usize,
    buffer: usize,
) -> Result<(Vec<f64>, usize)> {
    let m = qs_process(q)?;
    let b = effective_buffer(&m, n - 1, buffer)?;
    let level = q.max_level() - b;
    let integral = qs_process(&power_quadruple(q, n)?)?;
    let mut out = vec![];
    for k in 0..=q.grid().n_bins() {
        let mn = pow_table(m.sample(k), n)?.pop().expect("nonempty");
        out.push(mn.sub(integral.sample(k))?.op_norm_upto(level));
    }
    Ok((out, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fock_core::GridConfig;
    use processes::{identity_process, scenario, ScenarioName};

    #[test]
    fn first_power_is_identity_map() {
        let q = scenario(&ScenarioName::brownian(), GridConfig::new(2).unwrap(), 2)
            .unwrap()
            .quadruple;
        let p = power_quadruple(&q, 1).unwrap();
        assert_eq!(p.f.max_abs_diff(&q.f).unwrap(), 0.0);
    }

    #[test]
    fn brownian_square() {
        let grid = GridConfig::new(3).unwrap();
        let out = scenario(&ScenarioName::brownian(), grid, 3).unwrap();
        let p = power_quadruple(&out.quadruple, 2).unwrap();
        let b2 = out.reference.unwrap().scale(C64::new(2.0, 0.0)).unwrap();
        assert!(p.e.is_zero());
        assert!(p.f.max_abs_diff(&b2).unwrap() < 1e-15);
        assert!(p.g.max_abs_diff(&b2).unwrap() < 1e-15);
        assert!(
            p.h.max_abs_diff(&identity_process(grid, 3).unwrap())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn recursions_hold() {
        let grid = GridConfig::new(3).unwrap();
        for name in [
            ScenarioName::brownian(),
            ScenarioName::KernelBand {
                band: 1,
                xi: 1.0,
                seed: 2,
                gauge: true,
            },
        ] {
            let q = scenario(&name, grid, 4).unwrap().quadruple;
            for n in 1..=2 {
                let r = power_recursion_residual(&q, n, 0).unwrap();
                assert!(r <= 1e-12, "{} n={n}: {r:e}", name.label());
            }
        }
    }

    #[test]
    fn symmetric_powers_stay_symmetric() {
        let q = scenario(
            &ScenarioName::kernel_band(1, 1.0, 8),
            GridConfig::new(3).unwrap(),
            4,
        )
        .unwrap()
        .quadruple;
        let p = power_quadruple(&q, 2).unwrap();
        assert!(p.symmetry_residual().unwrap() < 1e-12);
    }
}
