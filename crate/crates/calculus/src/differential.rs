use cmx::linalg::Mat;
use cmx::ChaosMatrix;
use ndarray::Array2;

use crate::functions::{Evaluator, FunctionSpec};
use crate::kernels::{hadamard, ordered_second};
use crate::quadrature::QuadratureConfig;
use crate::spectral::Spectral;
use crate::{CalculusError, Result, C64};

/// Gaps at or below this use derivative limits in first divided
/// differences.
const NEAR_FIRST: f64 = 1e-5;
/// Spreads at or below this use the mean-value limit in second divided
/// differences, where the quotient loses about `ε/spread²`.
const NEAR_SECOND: f64 = 1e-4;

/// Scalar function data at the eigenvalues of `T`, with the divided
/// differences the differentials are built from.
pub(crate) struct Divided<'a> {
    ev: &'a Evaluator<'a>,
    lambda: Vec<f64>,
    vals: Vec<[C64; 3]>,
}

impl<'a> Divided<'a> {
    pub(crate) fn new(ev: &'a Evaluator<'a>, s: &Spectral) -> Self {
        let lambda = s.values.clone();
        let vals = lambda.iter().map(|&l| ev.eval(l)).collect();
        Self { ev, lambda, vals }
    }

    pub(crate) fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `f[λa, λb]`.
    pub(crate) fn first(&self, a: usize, b: usize) -> C64 {
        let d = self.lambda[a] - self.lambda[b];
        if d.abs() <= NEAR_FIRST {
            0.5 * (self.vals[a][1] + self.vals[b][1])
        } else {
            (self.vals[a][0] - self.vals[b][0]) / d
        }
    }

    /// `f[λa, λb, λc]`, pivoting on the widest pair.
    fn second(&self, a: usize, b: usize, c: usize) -> C64 {
        let idx = [a, b, c];
        let x = |i: usize| self.lambda[idx[i]];
        let (i, j) = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .max_by(|p, q| (x(p.0) - x(p.1)).abs().total_cmp(&(x(q.0) - x(q.1)).abs()))
            .expect("three pairs");
        let k = 3 - i - j;
        let gap = x(i) - x(j);
        if gap == 0.0 {
            return 0.5 * self.vals[a][2];
        }
        if gap.abs() <= NEAR_SECOND {
            return 0.5 * self.ev.eval((x(0) + x(1) + x(2)) / 3.0)[2];
        }
        (self.first(idx[i], idx[k]) - self.first(idx[k], idx[j])) / gap
    }

    /// `(f[λa, λb])`.
    pub(crate) fn k1(&self) -> Mat {
        let n = self.dim();
        Array2::from_shape_fn((n, n), |(a, b)| self.first(a, b))
    }

    /// `Df` in the eigenbasis: `K1 ∘ H̃`.
    pub(crate) fn first_tilde(&self, k1: &Mat, ht: &Mat) -> Mat {
        hadamard(k1, ht)
    }

    /// `D²_I f` in the eigenbasis: `Σ_b H̃_ab K̃_bc f[λa, λb, λc]`.
    pub(crate) fn second_tilde(&self, k1: &Mat, ht: &Mat, kt: &Mat) -> Mat {
        ordered_second(
            &self.lambda,
            ht,
            kt,
            k1,
            k1,
            |a, b, c| self.second(a, b, c),
            |a, b| self.second(a, b, a),
        )
    }
}

/// Scalar data for `f`: closed forms for polynomials, the Fourier
/// quadrature otherwise.
pub(crate) fn evaluator<'a>(f: &'a FunctionSpec, quad: &QuadratureConfig) -> Result<Evaluator<'a>> {
    f.validate()?;
    if f.is_polynomial() {
        Ok(Evaluator::exact(f))
    } else {
        Evaluator::fourier(f, quad)
    }
}

fn check_shape(t: &ChaosMatrix, x: &ChaosMatrix) -> Result<()> {
    if (t.n_modes(), t.max_level()) != (x.n_modes(), x.max_level()) {
        return Err(CalculusError::Config(
            "direction lives on a different Fock space".into(),
        ));
    }
    Ok(())
}

/// `Df(T)(H) = ∫∫ ip f̂(p) e^{ip(1-u)T} H e^{ipuT} du dp` on dense
/// matrices, with `T = V diag(λ) V*`; the `u`-integral is exact and the
/// `p`-integral is the evaluator's rule.
pub fn differential_with(ev: &Evaluator<'_>, s: &Spectral, h: &Mat) -> Mat {
    let dd = Divided::new(ev, s);
    let ht = s.sandwich(h, s);
    s.unsandwich(&dd.first_tilde(&dd.k1(), &ht), s)
}

/// `D²_I f(T)(H, K) = -∫∫∫ p² f̂(p) u e^{ip(1-u)T} H e^{ipu(1-v)T} K e^{ipuvT}`
/// on dense matrices, with the `u, v`-integrals done exactly.
pub fn ito_second_differential_with(ev: &Evaluator<'_>, s: &Spectral, h: &Mat, k: &Mat) -> Mat {
    let dd = Divided::new(ev, s);
    let (ht, kt) = (s.sandwich(h, s), s.sandwich(k, s));
    s.unsandwich(&dd.second_tilde(&dd.k1(), &ht, &kt), s)
}

/// First differential `Df(T)(H)` for Hermitian `T`.
pub fn differential(
    f: &FunctionSpec,
    t: &ChaosMatrix,
    h: &ChaosMatrix,
    quad: &QuadratureConfig,
) -> Result<ChaosMatrix> {
    check_shape(t, h)?;
    let ev = evaluator(f, quad)?;
    let s = Spectral::of(t)?;
    s.to_chaos(&differential_with(&ev, &s, &h.to_dense()))
}

/// Ordered second differential `D²_I f(T)(H, K)`.
pub fn ito_second_differential(
    f: &FunctionSpec,
    t: &ChaosMatrix,
    h: &ChaosMatrix,
    k: &ChaosMatrix,
    quad: &QuadratureConfig,
) -> Result<ChaosMatrix> {
    check_shape(t, h)?;
    check_shape(t, k)?;
    let ev = evaluator(f, quad)?;
    let s = Spectral::of(t)?;
    s.to_chaos(&ito_second_differential_with(
        &ev,
        &s,
        &h.to_dense(),
        &k.to_dense(),
    ))
}

/// Second differential `D²f(T)(H, K)` by direct quadrature of the triple
/// integral over `p`, `u`, `v` in the eigenbasis of `T`, for both orderings
/// of `H` and `K`. Costs one dense product per node, so it is meant as an
/// independent check on small matrices.
pub fn second_differential(
    f: &FunctionSpec,
    t: &ChaosMatrix,
    h: &ChaosMatrix,
    k: &ChaosMatrix,
    quad: &QuadratureConfig,
) -> Result<ChaosMatrix> {
    check_shape(t, h)?;
    check_shape(t, k)?;
    f.check_fourier(quad)?;
    let s = Spectral::of(t)?;
    let (hd, kd) = (h.to_dense(), k.to_dense());
    let (ht, kt) = (s.sandwich(&hd, &s), s.sandwich(&kd, &s));
    let u_rule = quad.u_rule();
    let n = s.dim();
    let mut out: Mat = Array2::zeros((n, n));
    let phases = |x: f64| -> Vec<C64> {
        s.values
            .iter()
            .map(|&l| C64::from_polar(1.0, x * l))
            .collect()
    };
    for (p, wp) in quad.p_rule() {
        let c = -wp * p * p * f.fourier(p).expect("checked");
        if c.norm() < 1e-300 {
            continue;
        }
        for &(u, wu) in &u_rule {
            let d1 = phases(p * (1.0 - u));
            for &(v, wv) in &u_rule {
                let (d2, d3) = (phases(p * u * (1.0 - v)), phases(p * u * v));
                let w = c * wu * wv * u;
                for (x, y) in [(&ht, &kt), (&kt, &ht)] {
                    let mut l = x.clone();
                    for ((a, b), z) in l.indexed_iter_mut() {
                        *z *= w * d1[a] * d2[b];
                    }
                    let mut r = y.clone();
                    for ((_, b), z) in r.indexed_iter_mut() {
                        *z *= d3[b];
                    }
                    out += &l.dot(&r);
                }
            }
        }
    }
    s.to_chaos(&s.unsandwich(&out, &s))
}

fn polynomial_coeffs(f: &FunctionSpec) -> Result<&[f64]> {
    match f {
        FunctionSpec::Polynomial { coeffs } => Ok(coeffs),
        _ => Err(CalculusError::Config(format!(
            "{} is not a polynomial",
            f.label()
        ))),
    }
}

/// `I, T, …, T^{n-1}`.
fn powers(t: &ChaosMatrix, n: usize) -> Result<Vec<ChaosMatrix>> {
    let mut out = vec![ChaosMatrix::identity(t.basis().clone())];
    if n > 1 {
        out.push(t.clone());
    }
    for _ in 2..n {
        let next = out.last().expect("nonempty").mul(t)?;
        out.push(next);
    }
    Ok(out)
}

/// `Σ c_k T^k` in the truncated algebra.
pub fn polynomial_apply(f: &FunctionSpec, t: &ChaosMatrix) -> Result<ChaosMatrix> {
    let c = polynomial_coeffs(f)?;
    let pw = powers(t, c.len().max(1))?;
    let mut out = ChaosMatrix::zeros(t.basis().clone(), None);
    for (ck, tk) in c.iter().zip(&pw) {
        out.add_scaled(C64::new(*ck, 0.0), tk)?;
    }
    out.prune();
    Ok(out)
}

/// `Df(T)(H) = Σ_k c_k Σ_{j<k} T^j H T^{k-1-j}` in the truncated algebra.
pub fn polynomial_differential(
    f: &FunctionSpec,
    t: &ChaosMatrix,
    h: &ChaosMatrix,
) -> Result<ChaosMatrix> {
    check_shape(t, h)?;
    let c = polynomial_coeffs(f)?;
    let pw = powers(t, c.len().max(1))?;
    let mut out = ChaosMatrix::zeros(t.basis().clone(), None);
    for (k, ck) in c.iter().enumerate().skip(1) {
        for j in 0..k {
            // Skip products with the identity.
            let left = if j == 0 { h.clone() } else { pw[j].mul(h)? };
            let term = if j + 1 == k {
                left
            } else {
                left.mul(&pw[k - 1 - j])?
            };
            out.add_scaled(C64::new(*ck, 0.0), &term)?;
        }
    }
    out.prune();
    Ok(out)
}
