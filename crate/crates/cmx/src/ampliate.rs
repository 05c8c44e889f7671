use std::sync::Arc;

use fock_core::{FockBasis, LadderKind, ModeSplit};
use ndarray::Array2;

use crate::ladder::{ladder_left, ladder_right};
use crate::linalg::{self, Mat};
use crate::{ChaosMatrix, CmxError, Result};

/// Extend an operator on the first `m` modes to `full` as `T ⊗ I`, using the
/// disjoint-mode identification of past and future occupations.
pub fn ampliate(t_past: &ChaosMatrix, full: &Arc<FockBasis>) -> Result<ChaosMatrix> {
    let m = t_past.n_modes();
    let big_j = full.max_level();
    if t_past.max_level() != big_j {
        return Err(CmxError::Structure(format!(
            "cutoff mismatch: {} vs {}",
            t_past.max_level(),
            big_j
        )));
    }
    if m > full.n_modes() {
        return Err(CmxError::GridIndex {
            m,
            n_bins: full.n_modes(),
        });
    }
    if m == full.n_modes() {
        return Ok(t_past.clone());
    }
    let split = ModeSplit::shared(full, m)?;
    let mut out = ChaosMatrix::zeros(full.clone(), t_past.band());
    if t_past.truncated() {
        out.mark_truncated();
    }
    for i in 0..=big_j {
        for j in 0..=big_j {
            let mut blk: Option<Mat> = None;
            for r in 0..=i.min(j) {
                let Some(src) = t_past.block(i - r, j - r) else {
                    continue;
                };
                let b = blk.get_or_insert_with(|| Array2::zeros((full.dim(i), full.dim(j))));
                for phi in 0..split.future_dim(i, r) {
                    let rows = split.embedding(i, r, phi);
                    let cols = split.embedding(j, r, phi);
                    for (a, &ri) in rows.iter().enumerate() {
                        for (c, &ci) in cols.iter().enumerate() {
                            b[[ri, ci]] = src[[a, c]];
                        }
                    }
                }
            }
            if let Some(b) = blk {
                out.set_block(i, j, b)?;
            }
        }
    }
    Ok(out)
}

/// Compression of `t` to the first `m` modes (the top-left corner of each
/// block). For an ampliation this recovers the past operator.
pub fn past_compression(t: &ChaosMatrix, m: usize) -> Result<ChaosMatrix> {
    if m > t.n_modes() {
        return Err(CmxError::GridIndex {
            m,
            n_bins: t.n_modes(),
        });
    }
    let past = FockBasis::shared(m, t.max_level())?;
    let mut out = ChaosMatrix::zeros(past.clone(), t.band());
    for (i, j, b) in t.blocks() {
        out.set_block(i, j, linalg::corner(b, past.dim(i), past.dim(j)))?;
    }
    out.prune();
    Ok(out)
}

/// Block norms of `T ⊗ I` from the block norms of `T`: the ampliated block
/// `(i, j)` is a direct sum of copies of `T^{i-r}_{j-r}`, `r ≤ min(i, j)`.
pub fn ampliated_block_norms(past: &Array2<f64>, has_future: bool) -> Array2<f64> {
    if !has_future {
        return past.clone();
    }
    let n = past.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| {
        (0..=i.min(j))
            .map(|r| past[[i - r, j - r]])
            .fold(0.0, f64::max)
    })
}

/// `max_k ‖D_k T - T D_k‖` and the same for `T*`, over future modes
/// `k ≥ m` and all level blocks not reaching past the cutoff. Zero exactly
/// when `T` is an ampliation from the first `m` modes.
pub fn adaptedness_residual(t: &ChaosMatrix, m: usize) -> Result<f64> {
    let n = t.n_modes();
    if m > n {
        return Err(CmxError::GridIndex { m, n_bins: n });
    }
    let scale = (n as f64).sqrt();
    let big_j = t.max_level();
    let ta = t.adjoint();
    let mut worst: f64 = 0.0;
    for x in [t, &ta] {
        for k in m..n {
            let left = ladder_left(LadderKind::Annihilate, k, x)?;
            let right = ladder_right(x, LadderKind::Annihilate, k)?;
            let diff = left.sub(&right)?;
            // Row level J of a_k T needs the absent T^{J+1}_j.
            for (i, _, b) in diff.blocks() {
                if i + 1 > big_j {
                    continue;
                }
                worst = worst.max(scale * residual_norm(b));
            }
        }
    }
    Ok(worst)
}

// Operator norm, short-cut by the Frobenius bound when that is already
// negligible (the bound is then reported, which can only overstate).
fn residual_norm(b: &Mat) -> f64 {
    let fro = linalg::frobenius(&b.view());
    if fro < 1e-13 {
        fro
    } else {
        linalg::op_norm(&b.view())
    }
}
