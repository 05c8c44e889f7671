use crate::{FockBasis, FockError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Annihilate,
    Create,
    Number,
}

/// Single-mode ladder operator restricted to one source level. Every column
/// has at most one nonzero entry, stored as `(row, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderBlock {
    pub kind: LadderKind,
    pub mode: usize,
    pub source_level: usize,
    pub target_level: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Option<(usize, f64)>>,
    /// Set when the image would leave the truncated space (creation at `J`).
    pub truncated: bool,
}

impl LadderBlock {
    /// Image of a source-level vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        for (c, e) in self.entries.iter().enumerate() {
            if let Some((r, v)) = e {
                y[*r] += x[c] * *v;
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (c, e) in self.entries.iter().enumerate() {
            if let Some((r, v)) = e {
                d[*r][c] = *v;
            }
        }
        d
    }
}

/// `a_k`, `a_k†` or `n_k` acting on level `level` of `basis`.
pub fn mode_ladder(
    basis: &FockBasis,
    kind: LadderKind,
    k: usize,
    level: usize,
) -> Result<LadderBlock> {
    if k >= basis.n_modes() {
        return Err(FockError::ModeOutOfRange {
            mode: k,
            n_modes: basis.n_modes(),
        });
    }
    let big_j = basis.max_level();
    if level > big_j {
        return Err(FockError::LevelOutOfRange {
            level,
            max_level: big_j,
        });
    }
    let cols = basis.dim(level);
    let target_level = match kind {
        LadderKind::Annihilate => level.saturating_sub(1),
        LadderKind::Create => level + 1,
        LadderKind::Number => level,
    };
    let truncated = kind == LadderKind::Create && level == big_j;
    if truncated || (kind == LadderKind::Annihilate && level == 0) {
        return Ok(LadderBlock {
            kind,
            mode: k,
            source_level: level,
            target_level,
            rows: basis.dim(target_level),
            cols,
            entries: vec![None; cols],
            truncated,
        });
    }
    let entries = basis
        .level(level)
        .iter()
        .map(|o| {
            let nu = o.occupation()[k];
            match kind {
                LadderKind::Number => {
                    if nu == 0 {
                        None
                    } else {
                        basis.index_of(o.occupation()).map(|r| (r, nu as f64))
                    }
                }
                LadderKind::Annihilate => {
                    if nu == 0 {
                        return None;
                    }
                    let mut occ = o.occupation().to_vec();
                    occ[k] -= 1;
                    basis.index_of(&occ).map(|r| (r, (nu as f64).sqrt()))
                }
                LadderKind::Create => {
                    let mut occ = o.occupation().to_vec();
                    occ[k] += 1;
                    basis.index_of(&occ).map(|r| (r, (nu as f64 + 1.0).sqrt()))
                }
            }
        })
        .collect();
    Ok(LadderBlock {
        kind,
        mode: k,
        source_level: level,
        target_level,
        rows: basis.dim(target_level),
        cols,
        entries,
        truncated: false,
    })
}
