//! Suites for identities that hold exactly on the grid.

use cmx::{adaptedness_residual, annihilator, creator, ChaosMatrix};
use fock_core::{exponential_vector, FockBasis, ModeSplit};
use qsi::{exp_matrix_element, qs_process, verify_bounds_adjoints, C64};
use rand::Rng;

use super::Ctx;
use crate::report::{CheckRecord, Rule, Run, Tolerance};
use crate::Result;

fn amplitudes(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6)))
        .collect()
}

pub(super) fn bounds_adjoints(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let tol = &ctx.cfg.tolerances;
    let q = ctx.primary(n)?.quadruple;
    let (mut excess, mut adjoint) = (vec![], vec![]);
    let mut halved = f64::NEG_INFINITY;
    for m in 0..=n {
        let rep = verify_bounds_adjoints(&q, m)?;
        excess.push(rep.worst_excess().max(0.0));
        adjoint.push(rep.adjoint_residual);
        for b in &rep.blocks {
            halved = halved.max(b.norm - 0.5 * b.bound);
        }
    }
    let worst = excess.iter().copied().fold(0.0, f64::max);
    let worst_adj = adjoint.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        CheckRecord::value(
            "block-norm-bounds",
            &ctx.label,
            ctx.at_most(tol.bound, "bound"),
            worst,
            vec![Run::new(n, big_j, Some(big_j), excess)],
        ),
        CheckRecord::value(
            "adjoint-identities",
            &ctx.label,
            ctx.at_most(tol.exact, "exact"),
            worst_adj,
            vec![Run::new(n, big_j, Some(big_j), adjoint)],
        ),
        CheckRecord::value(
            "halved-bounds",
            &ctx.label,
            ctx.at_most(tol.bound, "bound"),
            halved,
            vec![],
        )
        .control()
        .with_note("block norms against half the stated bounds"),
    ])
}

pub(super) fn matrix_elements(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let exact = ctx.cfg.tolerances.exact;
    let q = ctx.primary(n)?.quadruple;
    let m = qs_process(&q)?;
    let basis = FockBasis::shared(n, big_j)?;
    let mut rng = ctx.rng(1);
    let (f, g) = (amplitudes(n, &mut rng), amplitudes(n, &mut rng));
    let (ef, eg) = (
        exponential_vector(&basis, &f)?,
        exponential_vector(&basis, &g)?,
    );
    let (mut direct, mut swapped) = (vec![], vec![]);
    for k in 0..=n {
        let lhs = m.sample_full(k)?.apply(&ef).inner(&eg);
        direct.push((lhs - exp_matrix_element(&q, k, &f, &g)?).norm());
        swapped.push((lhs - exp_matrix_element(&q, k, &g, &f)?).norm());
    }
    let worst = direct.iter().copied().fold(0.0, f64::max);
    let worst_swapped = swapped.iter().copied().fold(0.0, f64::max);

    // [a_k, a_l†] = δ_kl on levels below the cutoff.
    let mut ccr: f64 = 0.0;
    let id = ChaosMatrix::identity(basis.clone());
    for k in 0..n {
        let a = annihilator(&basis, k)?;
        for l in 0..n {
            let c = creator(&basis, l)?;
            let mut comm = a.mul(&c)?.sub(&c.mul(&a)?)?;
            if k == l {
                comm = comm.sub(&id)?;
            }
            ccr = ccr.max(comm.op_norm_upto(big_j - 1));
        }
    }

    // e(g) = e(g_past) ⊗ e(g_future) across every split.
    let e = exponential_vector(&basis, &g)?;
    let mut split_err: f64 = 0.0;
    for cut in 0..=n {
        let past = exponential_vector(&FockBasis::new(cut, big_j)?, &g[..cut])?;
        let future = exponential_vector(&FockBasis::new(n - cut, big_j)?, &g[cut..])?;
        let split = ModeSplit::shared(&basis, cut)?;
        for j in 0..=big_j {
            for r in 0..=j {
                for phi in 0..split.future_dim(j, r) {
                    for (alpha, &idx) in split.embedding(j, r, phi).iter().enumerate() {
                        let want = past.level(j - r)[alpha] * future.level(r)[phi];
                        split_err = split_err.max((e.level(j)[idx] - want).norm());
                    }
                }
            }
        }
    }

    Ok(vec![
        CheckRecord::value(
            "exponential-vector-elements",
            &ctx.label,
            ctx.at_most(exact, "exact"),
            worst,
            vec![Run::new(n, big_j, Some(big_j), direct)],
        ),
        CheckRecord::value(
            "ccr-buffered",
            "fock",
            ctx.at_most(exact, "exact"),
            ccr,
            vec![],
        ),
        CheckRecord::value(
            "exponential-vector-factorization",
            "fock",
            ctx.at_most(exact, "exact"),
            split_err,
            vec![],
        ),
        CheckRecord::value(
            "swapped-amplitudes",
            &ctx.label,
            ctx.at_most(exact, "exact"),
            worst_swapped,
            vec![Run::new(n, big_j, Some(big_j), swapped)],
        )
        .control()
        .with_note("formula evaluated with f and g exchanged"),
    ])
}

pub(super) fn adaptedness(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let tol = &ctx.cfg.tolerances;
    let band = Tolerance::new(
        Rule::Band {
            pass_at_most: tol.exact,
            fail_at_least: tol.adapted_fail,
        },
        "adaptedness",
    );
    let q = ctx.primary(n)?.quadruple;
    let m = qs_process(&q)?;
    let full: Vec<ChaosMatrix> = (0..=n)
        .map(|k| m.sample_full(k))
        .collect::<std::result::Result<_, _>>()?;
    let (mut integrands, mut integral, mut shifted) = (vec![], vec![], vec![]);
    for k in 0..=n {
        let mut worst: f64 = 0.0;
        for c in q.components() {
            worst = worst.max(adaptedness_residual(&c.sample_full(k)?, k)?);
        }
        integrands.push(worst);
        // An ampliation from the first k bins is adapted at every later time.
        let mut worst: f64 = 0.0;
        for later in k..=n {
            worst = worst.max(adaptedness_residual(&full[k], later)?);
        }
        integral.push(worst);
        if k < n {
            shifted.push(adaptedness_residual(&full[k + 1], k)?);
        }
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        CheckRecord::value(
            "integrands-adapted",
            &ctx.label,
            band.clone(),
            max(&integrands),
            vec![Run::new(n, big_j, Some(big_j), integrands)],
        ),
        CheckRecord::value(
            "integral-adapted",
            &ctx.label,
            band.clone(),
            max(&integral),
            vec![Run::new(n, big_j, Some(big_j), integral)],
        ),
        CheckRecord::value(
            "future-shifted",
            &ctx.label,
            band,
            max(&shifted),
            vec![Run::with_times(
                n,
                big_j,
                Some(big_j),
                (0..n).map(|k| k as f64 / n as f64).collect(),
                shifted,
            )],
        )
        .control()
        .with_note("sample at t_{m+1} tested for adaptedness at t_m"),
    ])
}
