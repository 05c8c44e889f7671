//! Duhamel expansion and Stratonovich sums.

use calculus::{polynomial_apply, polynomial_differential, stratonovich_residual, FunctionSpec};
use cmx::{ampliate, ChaosMatrix, FockBasis};
use processes::ScenarioName;
use qsi::{qs_process, C64};

use super::Ctx;
use crate::report::{CheckRecord, Run};
use crate::Result;

const EXPANSION_TERMS: usize = 10;
/// Kernels are checked against `‖J‖ⁿ/n!` up to this order.
const BOUND_ORDER: usize = 6;

pub(super) fn duhamel_expansion(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let slack = ctx.cfg.tolerances.kernel_bound;
    let m = qs_process(&ctx.primary(n)?.quadruple)?.sample(n).clone();
    let kernel = ScenarioName::kernel_band(1, 1.0, ctx.cfg.seed.wrapping_add(2));
    let jp = qs_process(&ctx.build(&kernel, n, big_j)?.quadruple)?
        .sample(n)
        .clone();
    let jp = jp.scale_real(1.0 / jp.op_norm());
    let x = calculus::duhamel_expansion(&m, &jp, EXPANSION_TERMS, &ctx.cfg.quadrature)?;
    let upto = BOUND_ORDER.min(EXPANSION_TERMS);
    let excess = (0..=upto)
        .map(|k| x.kernel_norms[k] - x.bounds[k])
        .fold(f64::NEG_INFINITY, f64::max);
    let halved = (1..=upto)
        .map(|k| x.kernel_norms[k] - x.bounds[k] / 2f64.powi(k as i32))
        .fold(f64::NEG_INFINITY, f64::max);
    let label = format!("{} + {}", ctx.label, kernel.label());
    Ok(vec![
        CheckRecord::value(
            &format!("kernel-bounds n≤{upto}"),
            &label,
            ctx.at_most(slack, "kernel bound"),
            excess,
            vec![],
        )
        .with_note(format!(
            "‖K⁽ⁿ⁾(1)‖ = {:?}, {} panels",
            x.kernel_norms, x.panels
        )),
        CheckRecord::value(
            &format!("partial-sum-tail N={EXPANSION_TERMS}"),
            &label,
            ctx.at_most(slack, "kernel bound"),
            x.worst_tail_excess(),
            vec![],
        )
        .with_note(format!("residuals {:?}", x.partial_residuals)),
        CheckRecord::value(
            "halved-perturbation-norm",
            &label,
            ctx.at_most(slack, "kernel bound"),
            halved,
            vec![],
        )
        .control()
        .with_note("kernels against (‖J‖/2)ⁿ/n!"),
    ])
}

fn poly(c: &[f64]) -> FunctionSpec {
    FunctionSpec::Polynomial { coeffs: c.to_vec() }
}

/// Largest `d` with `2^d | n`.
fn dyadic_depth(n: usize) -> usize {
    n.trailing_zeros() as usize
}

fn runs_of(intervals: &[usize], residuals: &[f64], big_j: usize, level: usize) -> Vec<Run> {
    intervals
        .iter()
        .zip(residuals)
        .map(|(&k, &r)| Run::new(k, big_j, Some(level), vec![r]))
        .collect()
}

pub(super) fn stratonovich(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let n = *ctx.ladder().last().expect("validated ladder");
    let big_j = ctx.big_j();
    let depth = dyadic_depth(n);
    let q = ctx.primary(n)?.quadruple;
    let mut checks = vec![];
    let x = stratonovich_residual(&q, &poly(&[0.0, 1.0]), depth, ctx.buffer())?;
    checks.push(CheckRecord::value(
        "f(x)=x",
        &ctx.label,
        ctx.at_most(ctx.cfg.tolerances.exact, "exact"),
        x.max(),
        runs_of(&x.intervals, &x.residuals, big_j, x.checked_level),
    ));
    for (name, c) in [
        ("f(x)=x²", vec![0.0, 0.0, 1.0]),
        ("f(x)=x³", vec![0.0, 0.0, 0.0, 1.0]),
    ] {
        let r = stratonovich_residual(&q, &poly(&c), depth, ctx.buffer())?;
        checks.push(CheckRecord::order(
            name,
            &ctx.label,
            ctx.order_at_least(),
            runs_of(&r.intervals, &r.residuals, big_j, r.checked_level),
        ));
    }

    // Left-point sums of x² miss the quadratic variation and do not converge.
    let m = qs_process(&q)?;
    let level = big_j.saturating_sub(ctx.buffer().max(m.band()));
    let basis = FockBasis::shared(n, big_j)?;
    // Degree two: one extra band above the checked level suffices.
    let keep = (level + m.band()).min(big_j);
    let full =
        |k: usize| -> Result<ChaosMatrix> { Ok(ampliate(m.sample(k), &basis)?.compress(keep)) };
    let f = poly(&[0.0, 0.0, 1.0]);
    let target = polynomial_apply(&f, &full(n)?)?;
    let (mut intervals, mut residuals) = (vec![], vec![]);
    for l in 0..=depth {
        let parts = 1usize << l;
        let step = n / parts;
        let mut acc = ChaosMatrix::zeros(basis.clone(), None);
        for k in 0..parts {
            let (left, right) = (full(k * step)?, full((k + 1) * step)?);
            acc.add_scaled(
                C64::new(1.0, 0.0),
                &polynomial_differential(&f, &left, &right.sub(&left)?)?,
            )?;
        }
        intervals.push(parts);
        residuals.push(acc.sub(&target)?.op_norm_upto(level));
    }
    checks.push(
        CheckRecord::order(
            "left-point f(x)=x²",
            &ctx.label,
            ctx.order_at_least(),
            runs_of(&intervals, &residuals, big_j, level),
        )
        .control()
        .with_note("Df evaluated at the left end of each interval"),
    );
    Ok(checks)
}
