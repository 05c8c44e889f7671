use std::sync::Arc;

use cmx::linalg::{self, Mat};
use cmx::ChaosMatrix;
use fock_core::FockBasis;

use crate::functions::{Evaluator, FunctionSpec};
use crate::quadrature::QuadratureConfig;
use crate::{CalculusError, Result, C64};

/// Largest entrywise `|T - T*|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are merged to their mean.
pub const CLUSTER_TOL: f64 = 1e-10;

/// Eigendecomposition `T = V diag(λ) V*` of a Hermitian chaos matrix on
/// its truncated space, with near-equal eigenvalues merged.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: Vec<f64>,
    pub vectors: Mat,
    basis: Arc<FockBasis>,
}

fn hermitian_defect(a: &Mat) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

fn cluster(values: &mut [f64]) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        if end - start > 1 {
            let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            values[start..end].iter_mut().for_each(|v| *v = mean);
        }
        start = end;
    }
}

impl Spectral {
    pub fn of(t: &ChaosMatrix) -> Result<Self> {
        let dense = t.to_dense();
        let d = hermitian_defect(&dense);
        if d > HERMITIAN_TOL {
            return Err(CalculusError::NotHermitian(d));
        }
        let (mut values, vectors) = linalg::eigh(&dense.view())?;
        cluster(&mut values);
        Ok(Self {
            values,
            vectors,
            basis: t.basis().clone(),
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(g(λ)) V*`.
    pub fn apply_fn(&self, g: impl Fn(f64) -> C64) -> Mat {
        let d: Vec<C64> = self.values.iter().map(|&l| g(l)).collect();
        linalg::spectral_sum(&self.vectors, &d)
    }

    /// `V* X W` for `W` the eigenvectors of `right`.
    pub fn sandwich(&self, x: &Mat, right: &Spectral) -> Mat {
        linalg::adjoint(&self.vectors.view()).dot(&x.dot(&right.vectors))
    }

    /// `V Y W*`.
    pub fn unsandwich(&self, y: &Mat, right: &Spectral) -> Mat {
        self.vectors
            .dot(&y.dot(&linalg::adjoint(&right.vectors.view())))
    }

    pub fn to_chaos(&self, dense: &Mat) -> Result<ChaosMatrix> {
        Ok(ChaosMatrix::from_dense(self.basis.clone(), dense)?)
    }

    /// Unitary `e^{ipT}`.
    pub fn exp(&self, p: f64) -> Result<ChaosMatrix> {
        self.to_chaos(&self.apply_fn(|l| C64::from_polar(1.0, p * l)))
    }
}

/// `e^{ipT}` for Hermitian `T` on its truncated space.
pub fn cmx_exp(t: &ChaosMatrix, p: f64) -> Result<ChaosMatrix> {
    Spectral::of(t)?.exp(p)
}

#[derive(Debug, Clone)]
pub struct SeriesExp {
    pub value: ChaosMatrix,
    /// `Σ_{k > N} (|p| ‖T‖)^k / k!`.
    pub tail_bound: f64,
}

/// `Σ_{k ≤ N} (ipT)^k / k!` with the remainder bound from `‖T‖`.
pub fn exp_power_series(t: &ChaosMatrix, p: f64, n_terms: usize) -> Result<SeriesExp> {
    let d = t.to_dense();
    let defect = hermitian_defect(&d);
    if defect > HERMITIAN_TOL {
        return Err(CalculusError::NotHermitian(defect));
    }
    let ipt = d.mapv(|z| z * C64::new(0.0, p));
    let mut term = linalg::identity(d.nrows());
    let mut acc = term.clone();
    for k in 1..=n_terms {
        term = term.dot(&ipt).mapv(|z| z / k as f64);
        acc += &term;
    }
    let x = p.abs() * t.op_norm();
    let mut tail = 0.0;
    let mut tk = (1..=n_terms).fold(1.0, |a, k| a * x / k as f64);
    for k in n_terms + 1..n_terms + 200 {
        tk *= x / k as f64;
        tail += tk;
        if tk < 1e-300 {
            break;
        }
    }
    Ok(SeriesExp {
        value: ChaosMatrix::from_dense(t.basis().clone(), &acc)?,
        tail_bound: tail,
    })
}

/// `f(T)` through the eigendecomposition, with exact `f`.
pub fn spectral_apply(f: &FunctionSpec, t: &ChaosMatrix) -> Result<ChaosMatrix> {
    let s = Spectral::of(t)?;
    s.to_chaos(&s.apply_fn(|l| C64::new(f.value(l), 0.0)))
}

/// `f(T) = ∫ f̂(p) e^{ipT} dp` by the composite trapezoid rule. The sum of
/// unitaries is accumulated in the eigenbasis, one scalar sum per
/// eigenvalue, which is the same matrix as summing `f̂(p_j) e^{ip_j T}`.
pub fn fourier_apply(
    f: &FunctionSpec,
    t: &ChaosMatrix,
    quad: &QuadratureConfig,
) -> Result<ChaosMatrix> {
    let ev = Evaluator::fourier(f, quad)?;
    let s = Spectral::of(t)?;
    s.to_chaos(&s.apply_fn(|l| ev.eval(l)[0]))
}

/// `e^{ix/2}·sin(x/2)/(x/2) = ∫_0^1 e^{iux} du`, stable at `x = 0`.
pub fn phase_average(x: f64) -> C64 {
    let h = 0.5 * x;
    let sinc = if h.abs() < 1e-4 {
        1.0 - h * h / 6.0 + h.powi(4) / 120.0
    } else {
        h.sin() / h
    };
    C64::from_polar(sinc, h)
}
