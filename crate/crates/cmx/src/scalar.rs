use ndarray::Array2;

use crate::{CmxError, Result};

/// Time norm used for the entries of a scalar matrix, evaluated by the grid
/// rule (exact for bin-step processes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeNorm {
    L1,
    L2,
    Sup,
}

impl TimeNorm {
    /// Norm of a bin-step function with value `values[k]` on bin `k`.
    pub fn eval(self, values: &[f64], dt: f64) -> f64 {
        match self {
            TimeNorm::Sup => values.iter().fold(0.0, |m, &v| m.max(v)),
            TimeNorm::L2 => (values.iter().map(|v| v * v).sum::<f64>() * dt).sqrt(),
            TimeNorm::L1 => values.iter().sum::<f64>() * dt,
        }
    }
}

/// Nonnegative `(J+1) x (J+1)` matrix, ordered entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMatrix {
    entries: Array2<f64>,
}

impl ScalarMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(CmxError::Structure("scalar matrix must be square".into()));
        }
        if entries.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(CmxError::Structure(
                "scalar matrix entries must be nonnegative".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: Array2::zeros((n, n)),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| f(i, j)))
    }

    /// `ν^i_j = ‖t ↦ ‖X^i_j(t)‖‖_p` from per-bin block-norm tables.
    pub fn from_block_norms(per_bin: &[Array2<f64>], dt: f64, p: TimeNorm) -> Result<Self> {
        let n = per_bin.first().map_or(0, |t| t.nrows());
        let mut e = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let vals: Vec<f64> = per_bin.iter().map(|t| t[[i, j]]).collect();
                e[[i, j]] = p.eval(&vals, dt);
            }
        }
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            entries: self.entries.mapv(|x| x * c.abs()),
        }
    }

    /// `self ≺ other` entrywise, with an absolute slack.
    pub fn precedes(&self, other: &Self, slack: f64) -> bool {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .all(|(a, b)| *a <= b + slack)
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn band(&self) -> usize {
        self.entries
            .indexed_iter()
            .filter(|(_, &x)| x > 0.0)
            .map(|((i, j), _)| i.abs_diff(j))
            .max()
            .unwrap_or(0)
    }
}

/// Control matrix
/// `κ^i_j = √i ‖E^{i-1}_{j-1}‖_∞ √j + ‖F^i_{j-1}‖₂ √j + √i ‖G^{i-1}_j‖₂ + ‖H^i_j‖₁`
/// from the scalar matrices of the four integrands; out-of-range terms are zero.
pub fn control_matrix(
    e_sup: &ScalarMatrix,
    f_l2: &ScalarMatrix,
    g_l2: &ScalarMatrix,
    h_l1: &ScalarMatrix,
) -> Result<ScalarMatrix> {
    let n = e_sup.dim();
    if [f_l2.dim(), g_l2.dim(), h_l1.dim()].iter().any(|&d| d != n) {
        return Err(CmxError::Structure(
            "control matrix inputs differ in size".into(),
        ));
    }
    ScalarMatrix::from_fn(n, |i, j| {
        let (si, sj) = ((i as f64).sqrt(), (j as f64).sqrt());
        let mut k = h_l1.get(i, j);
        if i >= 1 && j >= 1 {
            k += si * e_sup.get(i - 1, j - 1) * sj;
        }
        if j >= 1 {
            k += f_l2.get(i, j - 1) * sj;
        }
        if i >= 1 {
            k += si * g_l2.get(i - 1, j);
        }
        k
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn value(self) -> f64 {
        match self {
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEstimate {
    /// Reciprocal of the largest ratio `c_{n+1}/c_n` over the last quartile.
    pub radius: Radius,
    /// Root-test value `c_N^{-1/N}` at the last term, for comparison.
    pub root_radius: f64,
    /// `log c_n`, `c_n = ‖κⁿ e_j‖ / n!`.
    pub log_terms: Vec<f64>,
    /// Whether the ratios over the last quartile are non-increasing.
    pub monotone: bool,
}

/// Estimate of the analytic radius of `e_j` under `κ` from the terms
/// `c_n = ‖κⁿ e_j‖ / n!`, `n ≤ n_terms`, computed in log space with
/// per-step renormalisation.
pub fn analytic_radius_estimate(
    kappa: &ScalarMatrix,
    j: usize,
    n_terms: usize,
) -> Result<RadiusEstimate> {
    if n_terms < 4 {
        return Err(CmxError::Structure(
            "analytic radius needs at least 4 terms".into(),
        ));
    }
    if j >= kappa.dim() {
        return Err(CmxError::Structure(format!(
            "basis index {j} outside dimension {}",
            kappa.dim()
        )));
    }
    let mut v = ndarray::Array1::<f64>::zeros(kappa.dim());
    v[j] = 1.0;
    let mut log_c = 0.0;
    let mut log_terms = vec![0.0];
    for n in 1..=n_terms {
        v = kappa.entries.dot(&v);
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s == 0.0 {
            return Ok(RadiusEstimate {
                radius: Radius::Infinite,
                root_radius: f64::INFINITY,
                log_terms,
                monotone: true,
            });
        }
        v.mapv_inplace(|x| x / s);
        log_c += s.ln() - (n as f64).ln();
        if !log_c.is_finite() {
            return Err(CmxError::Structure(
                "analytic radius iteration overflowed".into(),
            ));
        }
        log_terms.push(log_c);
    }
    let start = (3 * n_terms) / 4;
    let ratios: Vec<f64> = (start..n_terms)
        .map(|n| (log_terms[n + 1] - log_terms[n]).exp())
        .collect();
    let max_ratio = ratios.iter().fold(0.0, |m: f64, &r| m.max(r));
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let root = (-log_terms[n_terms] / n_terms as f64).exp();
    Ok(RadiusEstimate {
        radius: Radius::Finite(1.0 / max_ratio),
        root_radius: root,
        log_terms,
        monotone,
    })
}
