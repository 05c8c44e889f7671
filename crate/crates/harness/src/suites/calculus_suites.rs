//! Suites over the exponential and functional calculus.

use calculus::{
    cmx_exp, duhamel_integrands, duhamel_residual, fourier_apply, integrand_difference,
    ito_functional_residual, ito_integrands, ito_second_differential, second_differential,
    series_integrands, spectral_apply, CalculusError, DuhamelOptions, FunctionSpec,
    ItoFormulaOptions, QuadratureConfig, Spectral, UIntegration,
};
use cmx::{linalg, ChaosMatrix, FockBasis};
use processes::{KernelParams, Quadruple, ScenarioName, Theta};
use qsi::{qs_process, C64};

use super::Ctx;
use crate::report::{CheckRecord, Rule, Run, Tolerance};
use crate::Result;

const DUHAMEL_P: [f64; 3] = [0.5, 1.0, 2.0];
const SERIES_P: f64 = 0.5;
const SERIES_TERMS: [usize; 2] = [12, 20];
const SERIES_CONTROL_TERMS: usize = 4;

fn gaussian() -> FunctionSpec {
    FunctionSpec::gaussian(1.0)
}

/// Residual runs on the checked levels and on levels `≤ 1`.
type Ladder = (Vec<Run>, Vec<Run>);

fn split_runs(n: usize, big_j: usize, r: calculus::ResidualSeries, low: &mut Vec<Run>) -> Run {
    low.push(Run::new(
        n,
        big_j,
        Some(r.checked_level.min(1)),
        r.low_levels,
    ));
    Run::new(n, big_j, Some(r.checked_level), r.per_time)
}

fn duhamel_ladder(ctx: &Ctx<'_>, name: &ScenarioName, p: f64) -> Result<Ladder> {
    let opts = DuhamelOptions {
        buffer: ctx.buffer(),
        ..Default::default()
    };
    let (mut runs, mut low) = (vec![], vec![]);
    for &n in ctx.ladder() {
        let q = ctx.build(name, n, ctx.big_j())?.quadruple;
        let r = duhamel_residual(&q, p, &ctx.cfg.quadrature, &opts)?;
        runs.push(split_runs(n, ctx.big_j(), r, &mut low));
    }
    Ok((runs, low))
}

/// Second-order one-mode terms `dt·a_k²` add `O(√dt)` in operator norm
/// from level two up; levels `≤ 1` isolate the first-order behaviour.
const LOW_NOTE: &str = "levels ≤ 1, where dt·a_k² terms cannot act";

/// `q` with `G = iF`, which is not `F*` unless `F = 0`.
fn lopsided(q: &Quadruple) -> Result<Quadruple> {
    Ok(Quadruple::new(
        q.e.clone(),
        q.f.clone(),
        q.f.scale(C64::new(0.0, 1.0))?,
        q.h.clone(),
        false,
    )?)
}

/// Negative control: the Duhamel identity on a non-symmetric quadruple.
/// The calculus refuses it, which the suite records as a failed symmetry
/// check rather than an error.
fn asymmetric_control(ctx: &Ctx<'_>, q: &Quadruple, label: &str) -> Result<CheckRecord> {
    let bad = lopsided(q)?;
    let defect = bad.symmetry_residual()?;
    let outcome = match duhamel_residual(&bad, 1.0, &ctx.cfg.quadrature, &DuhamelOptions::default())
    {
        Err(CalculusError::NotSymmetric(d)) => format!("refused as non-symmetric (defect {d:e})"),
        Err(e) => format!("refused: {e}"),
        Ok(r) => format!("accepted, residual {:e}", r.max()),
    };
    Ok(CheckRecord::value(
        "asymmetric-quadruple",
        label,
        ctx.at_most(ctx.cfg.tolerances.exact, "exact"),
        defect,
        vec![],
    )
    .control()
    .with_note(format!("G = iF; Duhamel residual {outcome}")))
}

pub(super) fn duhamel(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let mut checks = vec![];
    let mut low_checks = vec![];
    for p in DUHAMEL_P {
        let (runs, low) = duhamel_ladder(ctx, &ctx.scenario, p)?;
        checks.push(CheckRecord::order(
            &format!("p={p}"),
            &ctx.label,
            ctx.order_one(),
            runs,
        ));
        low_checks.push(
            CheckRecord::order(&format!("p={p} levels≤1"), &ctx.label, ctx.order_one(), low)
                .with_note(LOW_NOTE),
        );
    }
    checks.extend(low_checks);
    let q = ctx.primary(ctx.n())?.quadruple;
    checks.push(asymmetric_control(ctx, &q, &ctx.label)?);
    Ok(checks)
}

pub(super) fn series_vs_quadrature(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let q = ctx.primary(n)?.quadruple;
    let b = ctx.buffer().max(qs_process(&q)?.band());
    let level = big_j.saturating_sub(b);
    let closed = duhamel_integrands(&q, SERIES_P, &ctx.cfg.quadrature, UIntegration::Exact)?;
    let tol = ctx.cfg.tolerances.quadrature;
    let mut checks = vec![];
    let compare = |terms: usize| -> Result<f64> {
        Ok(integrand_difference(
            &closed,
            &series_integrands(&q, SERIES_P, terms)?,
            level,
        )?)
    };
    for terms in SERIES_TERMS {
        let d = compare(terms)?;
        checks.push(
            CheckRecord::value(
                &format!("N={terms}"),
                &ctx.label,
                ctx.at_most(tol, "quadrature"),
                d,
                vec![],
            )
            .with_note(format!("p={SERIES_P}, levels ≤ {level}")),
        );
    }
    let rule = QuadratureConfig {
        u_order: 4,
        ..ctx.cfg.quadrature
    };
    let gl = duhamel_integrands(&q, SERIES_P, &rule, UIntegration::GaussLegendre)?;
    let gl16 = duhamel_integrands(
        &q,
        SERIES_P,
        &ctx.cfg.quadrature,
        UIntegration::GaussLegendre,
    )?;
    checks.push(CheckRecord::value(
        "gauss-legendre-vs-closed-form",
        &ctx.label,
        ctx.at_most(tol, "quadrature"),
        integrand_difference(&closed, &gl16, level)?,
        vec![],
    ));
    checks.push(
        CheckRecord::value(
            &format!("N={SERIES_CONTROL_TERMS}"),
            &ctx.label,
            ctx.at_most(tol, "quadrature"),
            compare(SERIES_CONTROL_TERMS)?.max(integrand_difference(&closed, &gl, level)?),
            vec![],
        )
        .control()
        .with_note("truncated series and a 4-point rule"),
    );
    Ok(checks)
}

fn random_chaos(
    basis: &std::sync::Arc<FockBasis>,
    hermitian: bool,
    rng: &mut impl rand::Rng,
) -> Result<ChaosMatrix> {
    let d = basis.total_dim();
    let m = if hermitian {
        linalg::random_hermitian(d, rng)
    } else {
        linalg::random_matrix(d, d, rng)
    };
    Ok(ChaosMatrix::from_dense(basis.clone(), &m)?)
}

pub(super) fn fourier_calculus(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let n = ctx.n();
    let tol = &ctx.cfg.tolerances;
    let quad = &ctx.cfg.quadrature;
    let m = qs_process(&ctx.primary(n)?.quadruple)?;
    let t = m.sample(n);
    let mut checks = vec![];
    let functions = [
        gaussian(),
        FunctionSpec::HermiteGaussian { n: 1, sigma: 1.0 },
        FunctionSpec::HermiteGaussian { n: 2, sigma: 1.2 },
    ];
    for f in &functions {
        let d = fourier_apply(f, t, quad)?
            .sub(&spectral_apply(f, t)?)?
            .op_norm();
        checks.push(CheckRecord::value(
            &format!("fourier-vs-spectral {}", f.label()),
            &ctx.label,
            ctx.at_most(tol.quadrature, "quadrature"),
            d,
            vec![],
        ));
    }
    if matches!(ctx.scenario, ScenarioName::Brownian {}) {
        let u = cmx_exp(t, 1.0)?;
        let z = u.block(0, 0).map_or(C64::new(0.0, 0.0), |b| b[[0, 0]]);
        checks.push(
            CheckRecord::value(
                "vacuum-characteristic-function",
                &ctx.label,
                ctx.at_most(tol.vacuum_characteristic, "spot value"),
                (z - C64::new((-0.5f64).exp(), 0.0)).norm(),
                vec![],
            )
            .with_note("|⟨vac, e^{iB_1} vac⟩ - e^{-1/2}|"),
        );
    }

    // D²f(H, K) = D²_I f(H, K) + D²_I f(K, H) and linearity of Df, on
    // random blocks of a two-mode, two-level space.
    let basis = FockBasis::shared(2, 2)?;
    let mut rng = ctx.rng(8);
    let tr = random_chaos(&basis, true, &mut rng)?;
    let (h, k) = (
        random_chaos(&basis, false, &mut rng)?,
        random_chaos(&basis, false, &mut rng)?,
    );
    let f = gaussian();
    let full = second_differential(&f, &tr, &h, &k, quad)?;
    let split = ito_second_differential(&f, &tr, &h, &k, quad)?
        .add(&ito_second_differential(&f, &tr, &k, &h, quad)?)?;
    checks.push(CheckRecord::value(
        "second-differential-symmetrisation",
        "random blocks",
        ctx.at_most(tol.symmetrisation, "symmetrisation"),
        full.sub(&split)?.max_abs(),
        vec![],
    ));
    let (a, b) = (C64::new(0.7, -0.2), C64::new(-1.3, 0.5));
    let mix = h.scale(a).add(&k.scale(b))?;
    let lin = calculus::differential(&f, &tr, &mix, quad)?.sub(
        &calculus::differential(&f, &tr, &h, quad)?
            .scale(a)
            .add(&calculus::differential(&f, &tr, &k, quad)?.scale(b))?,
    )?;
    checks.push(CheckRecord::value(
        "differential-linearity",
        "random blocks",
        ctx.at_most(tol.scalar_reduction, "scalar reduction"),
        lin.max_abs(),
        vec![],
    ));

    let coarse = QuadratureConfig {
        p_points: 15,
        ..*quad
    };
    let d = fourier_apply(&f, t, &coarse)?
        .sub(&spectral_apply(&f, t)?)?
        .op_norm();
    checks.push(
        CheckRecord::value(
            "coarse-p-rule",
            &ctx.label,
            ctx.at_most(tol.quadrature, "quadrature"),
            d,
            vec![],
        )
        .control()
        .with_note("15 trapezoid points in p"),
    );
    Ok(checks)
}

fn ito_ladder(ctx: &Ctx<'_>, name: &ScenarioName, drift: bool, sizes: &[usize]) -> Result<Ladder> {
    let opts = ItoFormulaOptions {
        buffer: ctx.buffer(),
        drift,
    };
    let (mut runs, mut low) = (vec![], vec![]);
    for &n in sizes {
        let q = ctx.build(name, n, ctx.big_j())?.quadruple;
        let r = ito_functional_residual(&q, &gaussian(), &ctx.cfg.quadrature, &opts)?;
        runs.push(split_runs(n, ctx.big_j(), r, &mut low));
    }
    Ok((runs, low))
}

pub(super) fn ito_functional(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (runs, low) = ito_ladder(ctx, &ctx.scenario, true, ctx.ladder())?;
    let mut checks = vec![
        CheckRecord::order("gaussian(1)", &ctx.label, ctx.order_one(), runs),
        CheckRecord::order("gaussian(1) levels≤1", &ctx.label, ctx.order_one(), low)
            .with_note(LOW_NOTE),
    ];
    let rotated = match &ctx.scenario {
        s @ ScenarioName::Rotated { .. } => s.clone(),
        _ => ScenarioName::Rotated {
            theta: Theta::default(),
        },
    };
    let top = [*ctx.ladder().last().expect("validated ladder")];
    let full = ito_ladder(ctx, &rotated, true, &top)?.0.remove(0);
    let ablated = ito_ladder(ctx, &rotated, false, &top)?.0.remove(0);
    checks.push(
        CheckRecord::value(
            "dropped-drift",
            &rotated.label(),
            Tolerance::new(
                Rule::AtMost {
                    limit: ctx.cfg.tolerances.ablation_factor,
                },
                "ablation",
            ),
            ablated.max_residual / full.max_residual,
            vec![full, ablated],
        )
        .control()
        .with_note("θ′Q drift removed: residual ratio ablated/full (fails when ≥ factor)"),
    );
    Ok(checks)
}

pub(super) fn brownian_classical(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (n, big_j) = (ctx.n(), ctx.big_j());
    let tol = &ctx.cfg.tolerances;
    let quad = &ctx.cfg.quadrature;
    let f = gaussian();
    let out = ctx.build(&ScenarioName::brownian(), n, big_j)?;
    let b = out.reference.expect("brownian carries B");
    let x = ito_integrands(&out.quadruple, &f, quad, true)?;
    let (mut kernels, mut unhalved) = (vec![], vec![]);
    for k in 0..=n {
        let s = Spectral::of(b.sample(k))?;
        let fp = s.to_chaos(&s.apply_fn(|l| C64::new(f.derivative(1, l), 0.0)))?;
        let fpp = s.to_chaos(&s.apply_fn(|l| C64::new(f.derivative(2, l), 0.0)))?;
        let half = fpp.scale_real(0.5);
        let e =
            x.f.sample(k)
                .sub(&fp)?
                .op_norm()
                .max(x.g.sample(k).sub(&fp)?.op_norm());
        kernels.push(e.max(x.h.sample(k).sub(&half)?.op_norm()));
        unhalved.push(x.h.sample(k).sub(&fpp)?.op_norm());
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);

    // Scalar T = τ, H = h, K = κ: Df = f′h, D²_I f = f″hκ/2, D²f = f″hκ.
    let basis = FockBasis::shared(1, 1)?;
    let scalar = |c: f64| ChaosMatrix::scalar(basis.clone(), C64::new(c, 0.0));
    let (h, kk) = (2.0, -0.7);
    let mut scalar_err: f64 = 0.0;
    for tau in [0.3, -1.1, 2.0] {
        let t = scalar(tau);
        let (hm, km) = (scalar(h), scalar(kk));
        let df = calculus::differential(&f, &t, &hm, quad)?;
        let d2i = ito_second_differential(&f, &t, &hm, &km, quad)?;
        let d2 = second_differential(&f, &t, &hm, &km, quad)?;
        let (f1, f2) = (f.derivative(1, tau), f.derivative(2, tau));
        scalar_err = scalar_err
            .max(df.sub(&scalar(f1 * h))?.max_abs())
            .max(d2i.sub(&scalar(0.5 * f2 * h * kk))?.max_abs())
            .max(d2.sub(&scalar(f2 * h * kk))?.max_abs());
    }

    Ok(vec![
        CheckRecord::value(
            "classical-kernels",
            "brownian",
            ctx.at_most(tol.quadrature, "quadrature"),
            max(&kernels),
            vec![Run::new(n, big_j, Some(big_j), kernels)],
        )
        .with_note("F = G = f′(B), H = f″(B)/2"),
        CheckRecord::value(
            "scalar-reductions",
            "scalar",
            ctx.at_most(tol.scalar_reduction, "scalar reduction"),
            scalar_err,
            vec![],
        ),
        CheckRecord::value(
            "time-kernel-without-half",
            "brownian",
            ctx.at_most(tol.quadrature, "quadrature"),
            max(&unhalved),
            vec![Run::new(n, big_j, Some(big_j), unhalved)],
        )
        .control()
        .with_note("H compared with f″(B) instead of f″(B)/2"),
    ])
}

pub(super) fn perturbation(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let (base, perturbed) = match &ctx.scenario {
        ScenarioName::Perturbed { base, .. } => ((**base).clone(), ctx.scenario.clone()),
        other => (
            other.clone(),
            ScenarioName::Perturbed {
                base: Box::new(other.clone()),
                perturbation: KernelParams {
                    band: 1,
                    xi: 0.5,
                    seed: ctx.cfg.seed.wrapping_add(1),
                },
            },
        ),
    };
    let mut checks = vec![];
    for name in [&base, &perturbed] {
        let (runs, _) = duhamel_ladder(ctx, name, 1.0)?;
        checks.push(CheckRecord::order(
            &format!("duhamel p=1 {}", name.label()),
            &name.label(),
            ctx.order_one(),
            runs,
        ));
    }
    let q = ctx.build(&perturbed, ctx.n(), ctx.big_j())?.quadruple;
    checks.push(asymmetric_control(ctx, &q, &perturbed.label())?);
    Ok(checks)
}
