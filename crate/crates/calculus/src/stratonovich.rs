use cmx::{ampliate, ChaosMatrix};
use fock_core::FockBasis;
use processes::Quadruple;
use qsi::qs_process;
use serde::{Deserialize, Serialize};

use crate::differential::{polynomial_apply, polynomial_differential};
use crate::duhamel::check_symmetric;
use crate::functions::FunctionSpec;
use crate::{CalculusError, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratonovichRecord {
    /// Number of partition intervals at each refinement.
    pub intervals: Vec<usize>,
    /// `‖Σ_k Df(½(M_{k+1} + M_k))(M_{k+1} - M_k) - (f(M_t) - f(0))‖` at the
    /// final time, per refinement.
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log` of the mesh,
    /// over the nonzero residuals; `None` with fewer than two.
    pub order: Option<f64>,
    pub effective_buffer: usize,
    pub checked_level: usize,
}

impl StratonovichRecord {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn degree(f: &FunctionSpec) -> Result<usize> {
    match f {
        FunctionSpec::Polynomial { coeffs } => {
            Ok(coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0))
        }
        _ => Err(CalculusError::Config(
            "midpoint sums are only evaluated for polynomials".into(),
        )),
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Midpoint (Stratonovich) sums of a polynomial `f` along `M = ∫ Q` on the
/// dyadic partitions with `1, 2, 4, …, 2^depth` intervals of `[0, t_n]`,
/// compared with `f(M_t) - f(0)` on levels `≤ J - b`, with `Df` expanded
/// algebraically and `b ≥ (deg f - 1)·band(M)`.
pub fn stratonovich_residual(
    q: &Quadruple,
    f: &FunctionSpec,
    depth: usize,
    buffer: usize,
) -> Result<StratonovichRecord> {
    f.validate()?;
    let deg = degree(f)?;
    if !q.e.is_zero() {
        return Err(CalculusError::GaugePresent);
    }
    check_symmetric(q)?;
    let n = q.grid().n_bins();
    if !n.is_multiple_of(1 << depth) {
        return Err(CalculusError::Config(format!(
            "{n} bins cannot be split into 2^{depth} intervals"
        )));
    }
    let m = qs_process(q)?;
    let b = buffer.max(deg.saturating_sub(1) * m.band());
    if b > q.max_level() {
        return Err(CalculusError::Capacity {
            needed: b,
            max_level: q.max_level(),
        });
    }
    let level = q.max_level() - b;
    // A chain of d band-k factors between levels ≤ L only passes through
    // levels ≤ L + ⌊d/2⌋k, so higher blocks never reach the checked ones.
    let keep = (level + (deg / 2) * m.band()).min(q.max_level());
    let basis = FockBasis::shared(n, q.max_level())?;
    let full =
        |k: usize| -> Result<ChaosMatrix> { Ok(ampliate(m.sample(k), &basis)?.compress(keep)) };
    let c0 = C64::new(f.value(0.0), 0.0);
    let target = polynomial_apply(f, &full(n)?)?.sub(&ChaosMatrix::scalar(basis.clone(), c0))?;
    let (mut intervals, mut residuals) = (vec![], vec![]);
    for l in 0..=depth {
        let parts = 1usize << l;
        let step = n / parts;
        let mut acc = ChaosMatrix::zeros(basis.clone(), None);
        let mut left = full(0)?;
        for k in 0..parts {
            let right = full((k + 1) * step)?;
            let mid = left.add(&right)?.scale_real(0.5);
            acc.add_scaled(
                C64::new(1.0, 0.0),
                &polynomial_differential(f, &mid, &right.sub(&left)?)?,
            )?;
            left = right;
        }
        intervals.push(parts);
        residuals.push(acc.sub(&target)?.op_norm_upto(level));
    }
    let pts: Vec<(f64, f64)> = intervals
        .iter()
        .zip(&residuals)
        .map(|(&k, &r)| (1.0 / k as f64, r))
        .collect();
    Ok(StratonovichRecord {
        intervals,
        residuals,
        order: log_slope(&pts),
        effective_buffer: b,
        checked_level: level,
    })
}
