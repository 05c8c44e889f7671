use cmx::linalg::Mat;
use cmx::ChaosMatrix;
use ndarray::Array2;
use processes::{CmxProcess, Quadruple};
use qsi::{past_sample, qs_process};
use serde::{Deserialize, Serialize};

use crate::kernels::{hadamard, ordered_second, ExpKernel};
use crate::quadrature::QuadratureConfig;
use crate::spectral::Spectral;
use crate::{CalculusError, ResidualSeries, Result, C64};

/// Quadruples with a symmetry residual above this are rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// How the `u` (and `v`) integrals of the Duhamel integrands are done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UIntegration {
    /// Closed-form divided differences of `x ↦ e^{ipx}`.
    #[default]
    Exact,
    /// Gauss–Legendre in `u`, tensorised in `(u, v)` for the double
    /// integral; one dense product per `(u, v)` node.
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DuhamelOptions {
    pub buffer: usize,
    pub u_integration: UIntegration,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        Self {
            buffer: 2,
            u_integration: UIntegration::Exact,
        }
    }
}

pub(crate) fn check_symmetric(q: &Quadruple) -> Result<()> {
    let r = q.symmetry_residual()?;
    if r > SYMMETRY_TOL {
        return Err(CalculusError::NotSymmetric(r));
    }
    Ok(())
}

/// Samples of `E, F, G, H` and of `M` at `t_k` on the first `k` modes.
pub(crate) struct Slice {
    pub m: ChaosMatrix,
    pub e: ChaosMatrix,
    pub f: ChaosMatrix,
    pub g: ChaosMatrix,
    pub h: ChaosMatrix,
}

impl Slice {
    pub(crate) fn at(q: &Quadruple, m: &CmxProcess, k: usize) -> Result<Self> {
        Ok(Self {
            m: past_sample(m, k)?,
            e: past_sample(&q.e, k)?,
            f: past_sample(&q.f, k)?,
            g: past_sample(&q.g, k)?,
            h: past_sample(&q.h, k)?,
        })
    }
}

fn phases(values: &[f64], x: f64) -> Vec<C64> {
    values
        .iter()
        .map(|&l| C64::from_polar(1.0, x * l))
        .collect()
}

fn scale_rows_cols(x: &Mat, rows: &[C64], cols: &[C64]) -> Mat {
    let mut out = x.clone();
    for ((a, b), z) in out.indexed_iter_mut() {
        *z *= rows[a] * cols[b];
    }
    out
}

/// The four Duhamel integrands of `e^{ipM}` from the samples at one time,
/// given the eigendecompositions of `M` and `N = M + E`.
fn integrands_from(
    sl: &Slice,
    sm: &Spectral,
    sn: &Spectral,
    p: f64,
    how: UIntegration,
    u_rule: &[(f64, f64)],
) -> Result<[ChaosMatrix; 4]> {
    let g = ExpKernel { p };
    let (lam, gam) = (&sm.values, &sn.values);
    let e_exp = sn.exp(p)?.sub(&sm.exp(p)?)?;
    let ft = sm.sandwich(&sl.f.to_dense(), sn);
    let gt = sn.sandwich(&sl.g.to_dense(), sm);
    let ht = sm.sandwich(&sl.h.to_dense(), sm);
    let ip = C64::new(0.0, p);
    let (f_t, g_t, h_t) = match how {
        UIntegration::Exact => {
            let p_lg =
                Array2::from_shape_fn((lam.len(), gam.len()), |(a, b)| g.first(lam[a], gam[b]));
            let p_gl =
                Array2::from_shape_fn((gam.len(), lam.len()), |(b, c)| g.first(gam[b], lam[c]));
            let p_ll =
                Array2::from_shape_fn((lam.len(), lam.len()), |(a, b)| g.first(lam[a], lam[b]));
            let second = ordered_second(
                lam,
                &ft,
                &gt,
                &p_lg,
                &p_gl,
                |a, b, c| g.second(lam[a], gam[b], lam[c]),
                |a, b| g.double(lam[a], gam[b]),
            );
            (
                hadamard(&p_lg, &ft),
                hadamard(&p_gl, &gt),
                hadamard(&p_ll, &ht) + second,
            )
        }
        UIntegration::GaussLegendre => {
            let (dl, dg) = (lam.len(), gam.len());
            let (mut f_t, mut g_t, mut h_t) = (
                Array2::zeros((dl, dg)),
                Array2::zeros((dg, dl)),
                Array2::<C64>::zeros((dl, dl)),
            );
            for &(u, wu) in u_rule {
                let (l1, lu) = (phases(lam, p * (1.0 - u)), phases(lam, p * u));
                let (g1, gu) = (phases(gam, p * (1.0 - u)), phases(gam, p * u));
                f_t += &scale_rows_cols(&ft, &l1, &gu).mapv(|z| z * ip * wu);
                g_t += &scale_rows_cols(&gt, &g1, &lu).mapv(|z| z * ip * wu);
                h_t += &scale_rows_cols(&ht, &l1, &lu).mapv(|z| z * ip * wu);
                for &(v, wv) in u_rule {
                    let (gm, lv) = (phases(gam, p * u * (1.0 - v)), phases(lam, p * u * v));
                    let w = ip * ip * wu * wv * u;
                    let left = scale_rows_cols(&ft, &l1, &gm);
                    h_t += &left
                        .dot(&scale_rows_cols(&gt, &vec![C64::new(1.0, 0.0); dg], &lv))
                        .mapv(|z| z * w);
                }
            }
            (f_t, g_t, h_t)
        }
    };
    Ok([
        e_exp,
        sm.to_chaos(&sm.unsandwich(&f_t, sn))?,
        sn.to_chaos(&sn.unsandwich(&g_t, sm))?,
        sm.to_chaos(&sm.unsandwich(&h_t, sm))?,
    ])
}

/// Eigendecompositions of `M` and `M + E` at one time.
fn spectra(sl: &Slice) -> Result<(Spectral, Option<Spectral>)> {
    let sm = Spectral::of(&sl.m)?;
    let sn = if sl.e.max_abs() == 0.0 {
        None
    } else {
        Some(Spectral::of(&sl.m.add(&sl.e)?)?)
    };
    Ok((sm, sn))
}

fn build(
    q: &Quadruple,
    p: f64,
    quad: &QuadratureConfig,
    how: UIntegration,
    upto: usize,
) -> Result<(Quadruple, Vec<Spectral>)> {
    quad.validate()?;
    check_symmetric(q)?;
    let m = qs_process(q)?;
    let (grid, big_j) = (q.grid(), q.max_level());
    let u_rule = quad.u_rule();
    let mut comps: [Vec<ChaosMatrix>; 4] = Default::default();
    let mut spec = vec![];
    for k in 0..=grid.n_bins() {
        let sl = Slice::at(q, &m, k)?;
        if k > upto {
            for slot in comps.iter_mut() {
                slot.push(ChaosMatrix::zeros(sl.m.basis().clone(), Some(0)));
            }
            spec.push(Spectral::of(&sl.m)?);
            continue;
        }
        let (sm, sn) = spectra(&sl)?;
        let x = integrands_from(&sl, &sm, sn.as_ref().unwrap_or(&sm), p, how, &u_rule)?;
        for (slot, mut xi) in comps.iter_mut().zip(x) {
            xi.prune();
            slot.push(xi);
        }
        spec.push(sm);
    }
    let [e, f, g, h] = comps.map(|s| CmxProcess::from_past_samples(grid, big_j, s));
    Ok((Quadruple::new(e?, f?, g?, h?, false)?, spec))
}

/// Integrands `(E_exp, F_exp, G_exp, H_exp)` of `e^{ipM_t}` at every grid
/// time, with `M = ∫(E, F, G, H)` and `N = M + E`:
///
/// - `E_exp = e^{ipN} - e^{ipM}`
/// - `F_exp = ip ∫ e^{i(1-u)pM} F e^{iupN} du`, `G_exp = ip ∫ e^{i(1-u)pN} G e^{iupM} du`
/// - `H_exp = ip ∫ e^{i(1-u)pM} H e^{iupM} du - p² ∫∫ u e^{i(1-u)pM} F e^{iu(1-v)pN} G e^{iuvpM} du dv`
pub fn duhamel_integrands(
    q: &Quadruple,
    p: f64,
    quad: &QuadratureConfig,
    how: UIntegration,
) -> Result<Quadruple> {
    Ok(build(q, p, quad, how, q.grid().n_bins())?.0)
}

/// Partial sums `Σ_{n ≤ N} (ip)ⁿ Xₙ / n!` of the power-series form, with
/// `Xₙ` the integrands of `Mⁿ` built by
/// `E_{n+1} = M Eₙ + E Mⁿ + E Eₙ`, `F_{n+1} = M Fₙ + F Mⁿ + F Eₙ`,
/// `G_{n+1} = M Gₙ + G Mⁿ + E Gₙ`, `H_{n+1} = M Hₙ + H Mⁿ + F Gₙ`
/// in the truncated algebra.
pub fn series_integrands(q: &Quadruple, p: f64, n_terms: usize) -> Result<Quadruple> {
    if n_terms == 0 {
        return Err(CalculusError::Config(
            "series needs at least one term".into(),
        ));
    }
    let m = qs_process(q)?;
    let (grid, big_j) = (q.grid(), q.max_level());
    let mut comps: [Vec<ChaosMatrix>; 4] = Default::default();
    for k in 0..=grid.n_bins() {
        let sl = Slice::at(q, &m, k)?;
        let mut x = [sl.e.clone(), sl.f.clone(), sl.g.clone(), sl.h.clone()];
        let mut mn = sl.m.clone();
        let mut c = C64::new(0.0, p);
        let mut acc = x.clone().map(|xi| xi.scale(c));
        for n in 1..n_terms {
            let [en, fnn, gn, hn] = &x;
            let next = [
                sl.m.mul(en)?.add(&sl.e.mul(&mn)?)?.add(&sl.e.mul(en)?)?,
                sl.m.mul(fnn)?.add(&sl.f.mul(&mn)?)?.add(&sl.f.mul(en)?)?,
                sl.m.mul(gn)?.add(&sl.g.mul(&mn)?)?.add(&sl.e.mul(gn)?)?,
                sl.m.mul(hn)?.add(&sl.h.mul(&mn)?)?.add(&sl.f.mul(gn)?)?,
            ];
            mn = mn.mul(&sl.m)?;
            c *= C64::new(0.0, p) / (n + 1) as f64;
            for (a, xi) in acc.iter_mut().zip(&next) {
                a.add_scaled(c, xi)?;
            }
            x = next;
        }
        for (slot, mut a) in comps.iter_mut().zip(acc) {
            a.prune();
            slot.push(a);
        }
    }
    let [e, f, g, h] = comps.map(|s| CmxProcess::from_past_samples(grid, big_j, s));
    Ok(Quadruple::new(e?, f?, g?, h?, false)?)
}

fn buffer_for(q: &Quadruple, m: &CmxProcess, buffer: usize) -> Result<usize> {
    let b = buffer.max(m.band().min(q.max_level()));
    if b > q.max_level() {
        return Err(CalculusError::Capacity {
            needed: b,
            max_level: q.max_level(),
        });
    }
    Ok(b)
}

/// `‖e^{ipM_t} - I - ∫(E_exp dΛ + F_exp dA + G_exp dA† + H_exp ds)‖` at
/// every grid time, on levels `≤ J - b` with `b ≥ band(M)`.
pub fn duhamel_residual(
    q: &Quadruple,
    p: f64,
    quad: &QuadratureConfig,
    opts: &DuhamelOptions,
) -> Result<ResidualSeries> {
    let m = qs_process(q)?;
    let b = buffer_for(q, &m, opts.buffer)?;
    let level = q.max_level() - b;
    let n = q.grid().n_bins();
    // The integrands at the right endpoint never enter the integral.
    let (integrands, spec) = build(q, p, quad, opts.u_integration, n.saturating_sub(1))?;
    let integral = qs_process(&integrands)?;
    let (mut per_time, mut low_levels) = (vec![], vec![]);
    for (k, sm) in spec.iter().enumerate() {
        let lhs = sm.exp(p)?.sub(&ChaosMatrix::identity(sm.basis().clone()))?;
        let r = lhs.sub(integral.sample(k))?;
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

/// Largest blockwise difference between two integrand quadruples over all
/// grid times, on levels `≤ level`.
pub fn integrand_difference(a: &Quadruple, b: &Quadruple, level: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.components().into_iter().zip(b.components()) {
        for k in 0..=a.grid().n_bins() {
            let d = x
                .sample(k)
                .compress(level)
                .max_abs_diff(&y.sample(k).compress(level))?;
            worst = worst.max(d);
        }
    }
    Ok(worst)
}
