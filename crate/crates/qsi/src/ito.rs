use cmx::{ampliate, ChaosMatrix};
use fock_core::{exponential_vector, FockBasis, StateVector};

use crate::integral::{increment, integrate, past_sample, IntegralTerm, LabeledIntegrand};
use crate::{labeled_integral, QsiError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItoOptions {
    /// Include the Ito-table term `∫ XY dA^α_δ` on the right-hand side.
    pub correction: bool,
    /// Requested buffer; raised to the band of the left factor if smaller.
    pub buffer: usize,
}

impl Default for ItoOptions {
    fn default() -> Self {
        Self {
            correction: true,
            buffer: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItoResidual {
    /// `‖M(X)M(Y) - ∫M(X)dY - ∫dX M(Y) - [∫XY dA^α_δ]‖` on the checked levels.
    pub residual: f64,
    /// Norm of `Σ_k dX_k dY_k - [∫XY dA^α_δ]`, the part of the exact discrete
    /// decomposition the right-hand side leaves out.
    pub dropped_diagonal: f64,
    /// Norm of the Ito-table term at `t_m` (zero when the table entry vanishes).
    pub correction_norm: f64,
    pub effective_buffer: usize,
    pub checked_level: usize,
    /// Number of operator products in the identity.
    pub products: usize,
}

struct Parts {
    /// `M(X)M(Y)` minus the right-hand side at `t_m`, all levels.
    residual: ChaosMatrix,
    /// Ito-table term, when the table entry is nonzero.
    corr: Option<processes::CmxProcess>,
    buffer: usize,
    level: usize,
}

fn residual_parts(
    x: &LabeledIntegrand,
    y: &LabeledIntegrand,
    m: usize,
    opts: ItoOptions,
) -> Result<Parts> {
    let grid = x.process.grid();
    let big_j = x.process.max_level();
    if m > grid.n_bins() {
        return Err(QsiError::GridIndex {
            m,
            n_bins: grid.n_bins(),
        });
    }
    let mx = labeled_integral(x)?;
    let my = labeled_integral(y)?;
    let (bx, by) = (x.integral_band(), y.integral_band());
    if bx + by > big_j {
        return Err(QsiError::Capacity {
            needed: bx + by,
            max_level: big_j,
        });
    }
    let b = opts.buffer.max(bx).max(by);

    let lhs = mx.sample(m).mul(my.sample(m))?;
    let p1 = mx.mul(&y.process)?;
    let p2 = x.process.mul(&my)?;
    let mut terms: Vec<IntegralTerm<'_>> = vec![(y.label, &p1), (x.label, &p2)];
    let xy = x.process.mul(&y.process)?;
    let table = x.label.ito_product(y.label);
    let corr = match table {
        Some(l) => Some(integrate(&[(l, &xy)])?),
        None => None,
    };
    if opts.correction {
        if let Some(l) = table {
            terms.push((l, &xy));
        }
    }
    let rhs = integrate(&terms)?;
    Ok(Parts {
        residual: lhs.sub(rhs.sample(m))?,
        corr,
        buffer: b,
        level: big_j - b,
    })
}

/// Product formula `M(X)M(Y) = ∫M(X) dY + ∫dX M(Y) + δ_{β1}δ_{γ1}∫XY dA^α_δ`
/// for `X dA^α_β`, `Y dA^γ_δ`, checked at `t_m` on levels `≤ J - b`.
pub fn ito_product_residual(
    x: &LabeledIntegrand,
    y: &LabeledIntegrand,
    m: usize,
    opts: ItoOptions,
) -> Result<ItoResidual> {
    let big_j = x.process.max_level();
    let Parts {
        residual,
        corr,
        buffer: b,
        level,
    } = residual_parts(x, y, m, opts)?;
    let residual = residual.op_norm_upto(level);

    let basis = FockBasis::shared(m, big_j)?;
    let mut diag = ChaosMatrix::zeros(basis.clone(), None);
    for k in 0..m {
        let b1 = FockBasis::shared(k + 1, big_j)?;
        let dx = increment(x.label, &x.process, k, &b1)?;
        let dy = increment(y.label, &y.process, k, &b1)?;
        diag.add_scaled(C64::new(1.0, 0.0), &ampliate(&dx.mul(&dy)?, &basis)?)?;
    }
    let corr_m = match &corr {
        Some(c) => past_sample(c, m)?,
        None => ChaosMatrix::zeros(basis, Some(0)),
    };
    let dropped = if opts.correction {
        diag.sub(&corr_m)?
    } else {
        diag
    };
    Ok(ItoResidual {
        residual,
        dropped_diagonal: dropped.op_norm_upto(level),
        correction_norm: corr_m.op_norm_upto(level),
        effective_buffer: b,
        checked_level: level,
        products: 1,
    })
}

/// Weak form of the product formula: `|⟨e(g), R e(f)⟩|` for the residual
/// operator `R` at `t_m`, with both exponential vectors cut off above the
/// checked level. `f` and `g` hold one amplitude per bin up to `t_m`.
pub fn ito_product_weak_residual(
    x: &LabeledIntegrand,
    y: &LabeledIntegrand,
    m: usize,
    opts: ItoOptions,
    f: &[C64],
    g: &[C64],
) -> Result<f64> {
    let parts = residual_parts(x, y, m, opts)?;
    let basis = parts.residual.basis().clone();
    let cut = |amps: &[C64]| -> Result<StateVector> {
        let mut v = exponential_vector(&basis, amps)?;
        for j in parts.level + 1..=basis.max_level() {
            v.level_mut(j)
                .iter_mut()
                .for_each(|c| *c = C64::new(0.0, 0.0));
        }
        Ok(v)
    };
    let (ef, eg) = (cut(f)?, cut(g)?);
    Ok(parts.residual.apply(&ef).inner(&eg).norm())
}
