//! Ito product formula and the powers identity.

use fock_core::{exponential_vector, FockBasis, GridConfig};
use processes::{identity_process, CmxProcess, Letter, Quadruple, ScenarioName};
use qsi::{
    ito_product_residual, ito_product_weak_residual, power_quadruple, powers_identity_residual,
    qs_process, ItoOptions, LabeledIntegrand, C64,
};

use super::{Ctx, ITO_CONTROL_BINS, ITO_CONTROL_LEVELS};
use crate::report::{CheckRecord, Rule, Run, Tolerance};
use crate::Result;

/// Label pairs whose Ito-table product is nonzero.
const CORRECTED_PAIRS: [(Letter, Letter, &str); 4] = [
    (Letter::Annihilation, Letter::Creation, "dA·dA†"),
    (Letter::Annihilation, Letter::Gauge, "dA·dΛ"),
    (Letter::Gauge, Letter::Creation, "dΛ·dA†"),
    (Letter::Gauge, Letter::Gauge, "dΛ·dΛ"),
];

fn labeled(
    n: usize,
    big_j: usize,
    x: Letter,
    y: Letter,
) -> Result<(LabeledIntegrand, LabeledIntegrand)> {
    let id = identity_process(GridConfig::new(n)?, big_j)?;
    Ok((
        LabeledIntegrand::new(id.clone(), x),
        LabeledIntegrand::new(id, y),
    ))
}

fn product_residual(
    n: usize,
    big_j: usize,
    x: Letter,
    y: Letter,
    opts: ItoOptions,
) -> Result<qsi::ItoResidual> {
    let (xi, yi) = labeled(n, big_j, x, y)?;
    Ok(ito_product_residual(&xi, &yi, n, opts)?)
}

/// `|⟨e(g), R e(f)⟩|` at `t = 1` for flat amplitudes of size `O(√dt)`.
fn weak_residual(n: usize, big_j: usize, x: Letter, y: Letter, opts: ItoOptions) -> Result<f64> {
    let (xi, yi) = labeled(n, big_j, x, y)?;
    let dt = 1.0 / n as f64;
    let f = vec![C64::new(0.5, 0.1) * dt.sqrt(); n];
    let g = vec![C64::new(-0.3, 0.4) * dt.sqrt(); n];
    Ok(ito_product_weak_residual(&xi, &yi, n, opts, &f, &g)?)
}

/// `M(X)M(Y)` against the product formula with `X = Y = I` on each label
/// pair that carries a correction, over the ladder, at `t = 1`.
pub(super) fn ito_product(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let big_j = ctx.big_j();
    let opts = ItoOptions {
        correction: true,
        buffer: ctx.buffer(),
    };
    let (mut checks, mut weak) = (vec![], vec![]);
    for (x, y, name) in CORRECTED_PAIRS {
        let (mut runs, mut weak_runs) = (vec![], vec![]);
        for &n in ctx.ladder() {
            let r = product_residual(n, big_j, x, y, opts)?;
            runs.push(Run::new(n, big_j, Some(r.checked_level), vec![r.residual]));
            weak_runs.push(Run::new(
                n,
                big_j,
                Some(r.checked_level),
                vec![weak_residual(n, big_j, x, y, opts)?],
            ));
        }
        checks.push(CheckRecord::order(
            name,
            "identity integrands",
            ctx.order_one(),
            runs,
        ));
        weak.push(
            CheckRecord::order(
                &format!("{name} exponential vectors"),
                "identity integrands",
                ctx.order_one(),
                weak_runs,
            )
            .with_note(
                "|⟨e(g), R e(f)⟩| with f, g = O(√dt) per bin, cut off above the checked level",
            ),
        );
    }
    checks.extend(weak);
    let (n, j) = (ITO_CONTROL_BINS, ITO_CONTROL_LEVELS);
    let with = product_residual(
        n,
        j,
        Letter::Annihilation,
        Letter::Creation,
        ItoOptions {
            correction: true,
            buffer: 1,
        },
    )?;
    let without = product_residual(
        n,
        j,
        Letter::Annihilation,
        Letter::Creation,
        ItoOptions {
            correction: false,
            buffer: 1,
        },
    )?;
    let ratio = without.residual / with.residual;
    checks.push(
        CheckRecord::value(
            "dropped-correction",
            "identity integrands",
            Tolerance::new(Rule::AtMost { limit: ctx.cfg.tolerances.ablation_factor }, "ablation"),
            ratio,
            vec![
                Run::new(n, j, Some(with.checked_level), vec![with.residual]),
                Run::new(n, j, Some(without.checked_level), vec![without.residual]),
            ],
        )
        .control()
        .with_note(format!(
            "dA·dA† without its dt correction, n={n}, J={j}: residual ratio ablated/full (fails when ≥ factor)"
        )),
    );
    Ok(checks)
}

/// `‖M_t² - ∫(E₂, F₂, F₂*, 0)‖`: the square without its time integrand.
fn square_without_time_part(q: &Quadruple, buffer: usize) -> Result<(Vec<f64>, usize)> {
    let p = power_quadruple(q, 2)?;
    let zero = CmxProcess::zero(q.grid(), q.max_level())?;
    let partial = qs_process(&Quadruple::new(p.e, p.f, p.g, zero, false)?)?;
    let m = qs_process(q)?;
    let b = buffer.max(m.band());
    let level = q.max_level().saturating_sub(b);
    let mut out = vec![];
    for k in 0..=q.grid().n_bins() {
        let mk = m.sample(k);
        out.push(mk.mul(mk)?.sub(partial.sample(k))?.op_norm_upto(level));
    }
    Ok((out, level))
}

pub(super) fn powers(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let big_j = ctx.big_j();
    let mut checks = vec![];
    for power in [2usize, 3] {
        let mut runs = vec![];
        for &n in ctx.ladder() {
            let q = ctx.primary(n)?.quadruple;
            let (r, b) = powers_identity_residual(&q, power, ctx.buffer())?;
            runs.push(Run::new(n, big_j, Some(big_j - b), r));
        }
        checks.push(CheckRecord::order(
            &format!("power-{power}"),
            &ctx.label,
            ctx.order_one(),
            runs,
        ));
    }

    // A_t² = 2∫A dA, in operator norm and between exponential vectors.
    let aa = ScenarioName::Polynomial {
        expr: "AA".parse()?,
    };
    let (mut op_runs, mut me_runs) = (vec![], vec![]);
    for &n in ctx.ladder() {
        let out = ctx.build(&aa, n, big_j)?;
        let m = qs_process(&out.quadruple)?;
        let diff = out
            .reference
            .expect("polynomial scenarios carry their process")
            .sub(&m)?;
        let level = big_j.saturating_sub(ctx.buffer().max(1));
        op_runs.push(Run::new(
            n,
            big_j,
            Some(level),
            (0..=n)
                .map(|k| diff.sample(k).op_norm_upto(level))
                .collect(),
        ));
        let basis = FockBasis::shared(n, big_j)?;
        let amp = |c: C64| vec![c * (1.0 / n as f64).sqrt(); n];
        let ef = exponential_vector(&basis, &amp(C64::new(0.5, 0.0)))?;
        let eg = exponential_vector(&basis, &amp(C64::new(0.0, 0.4)))?;
        let me: Vec<f64> = (0..=n)
            .map(|k| Ok(diff.sample_full(k)?.apply(&ef).inner(&eg).norm()))
            .collect::<Result<_>>()?;
        me_runs.push(Run::new(n, big_j, None, me));
    }
    checks.push(
        CheckRecord::order(
            "a-squared-operator-norm",
            "polynomial(AA)",
            ctx.order_one(),
            op_runs,
        )
        .with_note("discrepancy Σ dt a_k² has norm √(2t·dt) on level two"),
    );
    checks.push(CheckRecord::order(
        "a-squared-exponential-vectors",
        "polynomial(AA)",
        ctx.order_one(),
        me_runs,
    ));

    let mut runs = vec![];
    for &n in ctx.ladder() {
        let q = ctx.primary(n)?.quadruple;
        let (r, level) = square_without_time_part(&q, ctx.buffer())?;
        runs.push(Run::new(n, big_j, Some(level), r));
    }
    checks.push(
        CheckRecord::order("square-without-ito-term", &ctx.label, ctx.order_one(), runs)
            .control()
            .with_note("M² against ∫(E₂, F₂, F₂*, 0)"),
    );
    Ok(checks)
}
