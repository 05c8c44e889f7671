use cmx::ChaosMatrix;
use processes::{CmxProcess, Quadruple};
use qsi::qs_process;
use serde::{Deserialize, Serialize};

use crate::differential::{evaluator, Divided};
use crate::duhamel::{check_symmetric, Slice};
use crate::functions::FunctionSpec;
use crate::quadrature::QuadratureConfig;
use crate::spectral::Spectral;
use crate::{CalculusError, ResidualSeries, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ItoFormulaOptions {
    pub buffer: usize,
    /// Keep the `Df(M)(H) ds` term; turning it off is an ablation.
    pub drift: bool,
}

impl Default for ItoFormulaOptions {
    fn default() -> Self {
        Self {
            buffer: 2,
            drift: true,
        }
    }
}

fn build(
    q: &Quadruple,
    f: &FunctionSpec,
    quad: &QuadratureConfig,
    drift: bool,
    upto: usize,
) -> Result<(Quadruple, Vec<Spectral>)> {
    if !q.e.is_zero() {
        return Err(CalculusError::GaugePresent);
    }
    check_symmetric(q)?;
    let ev = evaluator(f, quad)?;
    let m = qs_process(q)?;
    let (grid, big_j) = (q.grid(), q.max_level());
    let mut comps: [Vec<ChaosMatrix>; 4] = Default::default();
    let mut spec = vec![];
    for k in 0..=grid.n_bins() {
        let sl = Slice::at(q, &m, k)?;
        let s = Spectral::of(&sl.m)?;
        let zero = ChaosMatrix::zeros(s.basis().clone(), Some(0));
        if k > upto {
            comps.iter_mut().for_each(|c| c.push(zero.clone()));
            spec.push(s);
            continue;
        }
        let dd = Divided::new(&ev, &s);
        let k1 = dd.k1();
        let (ft, gt) = (
            s.sandwich(&sl.f.to_dense(), &s),
            s.sandwich(&sl.g.to_dense(), &s),
        );
        let mut ht = dd.second_tilde(&k1, &ft, &gt);
        if drift {
            ht += &dd.first_tilde(&k1, &s.sandwich(&sl.h.to_dense(), &s));
        }
        let back = |x| -> Result<ChaosMatrix> {
            let mut c = s.to_chaos(&s.unsandwich(&x, &s))?;
            c.prune();
            Ok(c)
        };
        comps[0].push(zero);
        comps[1].push(back(dd.first_tilde(&k1, &ft))?);
        comps[2].push(back(dd.first_tilde(&k1, &gt))?);
        comps[3].push(back(ht)?);
        spec.push(s);
    }
    let [e, fc, g, h] = comps.map(|s| CmxProcess::from_past_samples(grid, big_j, s));
    Ok((Quadruple::new(e?, fc?, g?, h?, false)?, spec))
}

/// Integrands of `f(M_t)` for gauge-free `M = ∫(0, F, G, H)`:
/// `(0, Df(M)(F), Df(M)(G), Df(M)(H) + D²_I f(M)(F, G))`, sampled at each
/// grid time. With `drift = false` the `Df(M)(H)` term is left out.
pub fn ito_integrands(
    q: &Quadruple,
    f: &FunctionSpec,
    quad: &QuadratureConfig,
    drift: bool,
) -> Result<Quadruple> {
    Ok(build(q, f, quad, drift, q.grid().n_bins())?.0)
}

/// `‖f(M_t) - f(0) - ∫(Df(M)(dM) + D²_I f(M)(dM, dM))‖` at every grid time,
/// on levels `≤ J - b` with `b ≥ band(M)`, where `f(M_t)` comes from the
/// eigendecomposition.
pub fn ito_functional_residual(
    q: &Quadruple,
    f: &FunctionSpec,
    quad: &QuadratureConfig,
    opts: &ItoFormulaOptions,
) -> Result<ResidualSeries> {
    let m = qs_process(q)?;
    let b = opts.buffer.max(m.band());
    if b > q.max_level() {
        return Err(CalculusError::Capacity {
            needed: b,
            max_level: q.max_level(),
        });
    }
    let level = q.max_level() - b;
    let n = q.grid().n_bins();
    let (integrands, spec) = build(q, f, quad, opts.drift, n.saturating_sub(1))?;
    let integral = qs_process(&integrands)?;
    let f0 = C64::new(f.value(0.0), 0.0);
    let (mut per_time, mut low_levels) = (vec![], vec![]);
    for (k, s) in spec.iter().enumerate() {
        let fm = s.to_chaos(&s.apply_fn(|l| C64::new(f.value(l), 0.0)))?;
        let rhs = ChaosMatrix::scalar(s.basis().clone(), f0).add(integral.sample(k))?;
        let r = fm.sub(&rhs)?;
        per_time.push(r.op_norm_upto(level));
        low_levels.push(r.op_norm_upto(level.min(1)));
    }
    Ok(ResidualSeries {
        per_time,
        low_levels,
        effective_buffer: b,
        checked_level: level,
    })
}
