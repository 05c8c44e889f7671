use std::sync::Arc;

use fock_core::{mode_ladder, FockBasis, LadderKind};
use ndarray::Array2;

use crate::linalg::Mat;
use crate::{ChaosMatrix, Result, C64};

fn ladder_matrix(basis: &Arc<FockBasis>, kind: LadderKind, k: usize) -> Result<ChaosMatrix> {
    let mut t = ChaosMatrix::zeros(
        basis.clone(),
        Some(if kind == LadderKind::Number { 0 } else { 1 }),
    );
    for j in 0..=basis.max_level() {
        let lb = mode_ladder(basis, kind, k, j)?;
        if lb.truncated {
            t.mark_truncated();
            continue;
        }
        if kind == LadderKind::Annihilate && j == 0 {
            continue;
        }
        let mut b = Array2::zeros((lb.rows, lb.cols));
        for (c, e) in lb.entries.iter().enumerate() {
            if let Some((r, v)) = e {
                b[[*r, c]] = C64::new(*v, 0.0);
            }
        }
        t.set_block(lb.target_level, j, b)?;
    }
    Ok(t)
}

/// `a_k` as a chaos matrix.
pub fn annihilator(basis: &Arc<FockBasis>, k: usize) -> Result<ChaosMatrix> {
    ladder_matrix(basis, LadderKind::Annihilate, k)
}

/// `a_k†` as a chaos matrix; creation out of level `J` is dropped.
pub fn creator(basis: &Arc<FockBasis>, k: usize) -> Result<ChaosMatrix> {
    ladder_matrix(basis, LadderKind::Create, k)
}

/// `n_k = a_k† a_k`.
pub fn number(basis: &Arc<FockBasis>, k: usize) -> Result<ChaosMatrix> {
    ladder_matrix(basis, LadderKind::Number, k)
}

fn grow(band: Option<usize>, kind: LadderKind) -> Option<usize> {
    match kind {
        LadderKind::Number => band,
        _ => band.map(|b| b + 1),
    }
}

/// `L X` for a single-mode ladder `L`, using the one-entry-per-column
/// structure instead of a dense product.
pub fn ladder_left(kind: LadderKind, k: usize, x: &ChaosMatrix) -> Result<ChaosMatrix> {
    let basis = x.basis().clone();
    let big_j = basis.max_level();
    let mut out = ChaosMatrix::zeros(basis.clone(), grow(x.band(), kind));
    if x.truncated() {
        out.mark_truncated();
    }
    for (s, j, b) in x.blocks() {
        let lb = mode_ladder(&basis, kind, k, s)?;
        if lb.truncated {
            out.mark_truncated();
            continue;
        }
        if kind == LadderKind::Annihilate && s == 0 {
            continue;
        }
        let target = lb.target_level;
        let mut o: Mat = Array2::zeros((basis.dim(target), b.ncols()));
        for (c, e) in lb.entries.iter().enumerate() {
            if let Some((r, v)) = e {
                o.row_mut(*r).scaled_add(C64::new(*v, 0.0), &b.row(c));
            }
        }
        debug_assert!(target <= big_j);
        out.block_mut(target, j)?.scaled_add(C64::new(1.0, 0.0), &o);
    }
    Ok(out)
}

/// `X L` for a single-mode ladder `L`.
pub fn ladder_right(x: &ChaosMatrix, kind: LadderKind, k: usize) -> Result<ChaosMatrix> {
    let basis = x.basis().clone();
    let big_j = basis.max_level();
    let mut out = ChaosMatrix::zeros(basis.clone(), grow(x.band(), kind));
    if x.truncated() || kind == LadderKind::Create {
        // Column level J of X a† would need the missing blocks X^i_{J+1}.
        out.mark_truncated();
    }
    for (i, s, b) in x.blocks() {
        // L maps column level j to level s; find j.
        let j = match kind {
            LadderKind::Annihilate => s + 1,
            LadderKind::Create => match s.checked_sub(1) {
                Some(j) => j,
                None => continue,
            },
            LadderKind::Number => s,
        };
        if j > big_j {
            continue;
        }
        let lb = mode_ladder(&basis, kind, k, j)?;
        let mut o: Mat = Array2::zeros((b.nrows(), basis.dim(j)));
        for (c, e) in lb.entries.iter().enumerate() {
            if let Some((r, v)) = e {
                o.column_mut(c).scaled_add(C64::new(*v, 0.0), &b.column(*r));
            }
        }
        out.block_mut(i, j)?.scaled_add(C64::new(1.0, 0.0), &o);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(b: &Arc<FockBasis>, seed: u64) -> ChaosMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = ChaosMatrix::zeros(b.clone(), None);
        for i in 0..=b.max_level() {
            for j in 0..=b.max_level() {
                t.set_block(i, j, linalg::random_matrix(b.dim(i), b.dim(j), &mut rng))
                    .unwrap();
            }
        }
        t
    }

    #[test]
    fn sparse_products_match_dense() {
        let b = FockBasis::shared(3, 3).unwrap();
        let x = random(&b, 11);
        for k in 0..3 {
            for kind in [
                LadderKind::Annihilate,
                LadderKind::Create,
                LadderKind::Number,
            ] {
                let l = ladder_matrix(&b, kind, k).unwrap();
                let left = ladder_left(kind, k, &x).unwrap();
                let right = ladder_right(&x, kind, k).unwrap();
                assert!(left.max_abs_diff(&l.mul(&x).unwrap()).unwrap() < 1e-14);
                assert!(right.max_abs_diff(&x.mul(&l).unwrap()).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn number_is_creation_times_annihilation() {
        let b = FockBasis::shared(2, 4).unwrap();
        for k in 0..2 {
            let n = number(&b, k).unwrap();
            let p = creator(&b, k)
                .unwrap()
                .mul(&annihilator(&b, k).unwrap())
                .unwrap();
            assert!(n.max_abs_diff(&p).unwrap() < 1e-14);
            assert!(
                creator(&b, k)
                    .unwrap()
                    .adjoint()
                    .max_abs_diff(&annihilator(&b, k).unwrap())
                    .unwrap()
                    == 0.0
            );
        }
    }
}
