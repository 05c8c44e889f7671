use cmx::{analytic_radius_estimate, ScalarMatrix};

use super::Ctx;
use crate::report::{CheckRecord, Rule, Tolerance};
use crate::Result;

/// Terms for the band-1 linear-growth matrix, whose ratio estimate
/// settles slowly.
const LINEAR_TERMS: usize = 200;
const BROWNIAN_TERMS: usize = 40;
const BROWNIAN_LONG_TERMS: usize = 400;

/// Band-1 matrix with entries `g(i + j)`, large enough that `κⁿ e_0`,
/// `n ≤ terms`, never reaches the edge.
fn band_one(terms: usize, g: impl Fn(f64) -> f64) -> Result<ScalarMatrix> {
    Ok(ScalarMatrix::from_fn(terms + 2, |i, j| {
        if i.abs_diff(j) <= 1 {
            g((i + j) as f64)
        } else {
            0.0
        }
    })?)
}

/// Control matrix of the Brownian quadruple without a level cutoff:
/// `κ^i_{i+1} = κ^{i+1}_i = √(i+1)`.
fn brownian_kappa(terms: usize) -> Result<ScalarMatrix> {
    Ok(ScalarMatrix::from_fn(terms + 2, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    })?)
}

pub(super) fn analytic_radius(ctx: &Ctx<'_>) -> Result<Vec<CheckRecord>> {
    let tol = &ctx.cfg.tolerances;
    let at_least = |limit: f64| Tolerance::new(Rule::AtLeast { limit }, "radius");
    let linear = analytic_radius_estimate(&band_one(LINEAR_TERMS, |s| s)?, 0, LINEAR_TERMS)?;
    let short = analytic_radius_estimate(&brownian_kappa(BROWNIAN_TERMS)?, 0, BROWNIAN_TERMS)?;
    let long = analytic_radius_estimate(
        &brownian_kappa(BROWNIAN_LONG_TERMS)?,
        0,
        BROWNIAN_LONG_TERMS,
    )?;
    let quadratic = analytic_radius_estimate(&band_one(LINEAR_TERMS, |s| s * s)?, 0, LINEAR_TERMS)?;
    let (s, l) = (short.radius.value(), long.radius.value());
    Ok(vec![
        CheckRecord::value(
            "band-1 entries i+j",
            "scalar",
            at_least(tol.radius_min),
            linear.radius.value(),
            vec![],
        )
        .with_note(format!(
            "{LINEAR_TERMS} terms, monotone ratios: {}",
            linear.monotone
        )),
        CheckRecord::value(
            &format!("brownian N={BROWNIAN_TERMS}"),
            "brownian",
            at_least(tol.brownian_radius_min),
            s,
            vec![],
        )
        .with_note(format!("root test {:.3}", short.root_radius)),
        CheckRecord::value(
            "brownian estimate grows with N",
            "brownian",
            at_least(1.0),
            l / s,
            vec![],
        )
        .with_note(format!(
            "radius {s:.3} at N={BROWNIAN_TERMS}, {l:.3} at N={BROWNIAN_LONG_TERMS}"
        )),
        CheckRecord::value(
            "band-1 entries (i+j)²",
            "scalar",
            at_least(tol.radius_min),
            quadratic.radius.value(),
            vec![],
        )
        .control()
        .with_note("quadratic growth has no analytic vectors"),
    ])
}
