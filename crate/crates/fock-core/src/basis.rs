use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{FockError, Result};

/// Occupation numbers `ν_k` of the bins; the level is `Σ ν_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationIndex {
    occupation: Vec<u32>,
}

impl OccupationIndex {
    pub fn new(occupation: Vec<u32>) -> Self {
        Self { occupation }
    }

    pub fn occupation(&self) -> &[u32] {
        &self.occupation
    }

    pub fn level(&self) -> usize {
        self.occupation.iter().map(|&v| v as usize).sum()
    }

    pub fn n_modes(&self) -> usize {
        self.occupation.len()
    }
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Dimension of level `j` over `n` modes, `C(n + j - 1, j)`.
pub fn level_dim(n: usize, level: usize) -> Result<usize> {
    if level == 0 {
        return Ok(1);
    }
    if n == 0 {
        return Ok(0);
    }
    binomial(n + level - 1, level).ok_or(FockError::Capacity { n, level })
}

/// All occupations of `n` modes with total `level`, in graded colexicographic
/// order: compare at the last mode where two occupations differ. Occupations
/// supported on the first `m` modes therefore form a prefix of the level.
pub fn enumerate_basis(n: usize, level: usize) -> Result<Vec<OccupationIndex>> {
    let dim = level_dim(n, level)?;
    let mut out = Vec::with_capacity(dim);
    if n == 0 {
        if level == 0 {
            out.push(OccupationIndex::new(Vec::new()));
        }
        return Ok(out);
    }
    let mut current = vec![0u32; n];
    fill(&mut current, n, level, &mut out);
    debug_assert_eq!(out.len(), dim);
    Ok(out)
}

// Fix the last free mode, smallest value first, and recurse on the rest.
fn fill(cur: &mut Vec<u32>, free: usize, remaining: usize, out: &mut Vec<OccupationIndex>) {
    if free == 1 {
        cur[0] = remaining as u32;
        out.push(OccupationIndex::new(cur.clone()));
        cur[0] = 0;
        return;
    }
    for v in 0..=remaining {
        cur[free - 1] = v as u32;
        fill(cur, free - 1, remaining - v, out);
    }
    cur[free - 1] = 0;
}

/// Occupation basis of levels `0..=J` over `n` modes, with index lookup.
#[derive(Debug)]
pub struct FockBasis {
    n_modes: usize,
    max_level: usize,
    levels: Vec<Vec<OccupationIndex>>,
    lookup: Vec<HashMap<Vec<u32>, usize>>,
}

type BasisCache = Mutex<HashMap<(usize, usize), Arc<FockBasis>>>;
type SplitCache = Mutex<HashMap<(usize, usize, usize), Arc<ModeSplit>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn split_cache() -> &'static SplitCache {
    static CACHE: OnceLock<SplitCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl FockBasis {
    pub fn new(n_modes: usize, max_level: usize) -> Result<Self> {
        let mut levels = Vec::with_capacity(max_level + 1);
        let mut lookup = Vec::with_capacity(max_level + 1);
        for j in 0..=max_level {
            let lv = enumerate_basis(n_modes, j)?;
            let map = lv
                .iter()
                .enumerate()
                .map(|(i, o)| (o.occupation.clone(), i))
                .collect();
            levels.push(lv);
            lookup.push(map);
        }
        Ok(Self {
            n_modes,
            max_level,
            levels,
            lookup,
        })
    }

    /// Process-wide shared instance; bases are immutable so sharing is safe.
    pub fn shared(n_modes: usize, max_level: usize) -> Result<Arc<FockBasis>> {
        let key = (n_modes, max_level);
        if let Some(b) = basis_cache().lock().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(Self::new(n_modes, max_level)?);
        Ok(basis_cache()
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(b)
            .clone())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn dim(&self, level: usize) -> usize {
        self.levels.get(level).map_or(0, |l| l.len())
    }

    pub fn total_dim(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    /// Offset of each level in the flattened (level-major) ordering.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.max_level + 2);
        let mut acc = 0;
        for l in &self.levels {
            off.push(acc);
            acc += l.len();
        }
        off.push(acc);
        off
    }

    pub fn level(&self, level: usize) -> &[OccupationIndex] {
        &self.levels[level]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        let level: usize = occupation.iter().map(|&v| v as usize).sum();
        self.lookup.get(level)?.get(occupation).copied()
    }
}

/// Identification of the `n`-mode space with past (`k < m`) and future
/// (`k ≥ m`) occupations.
#[derive(Debug)]
pub struct ModeSplit {
    n_modes: usize,
    m: usize,
    max_level: usize,
    // embed[j][r][φ][α] = full level-j index of (α, φ), α a past level-(j-r)
    // state and φ a future level-r state.
    embed: Vec<Vec<Vec<Vec<usize>>>>,
}

impl ModeSplit {
    pub fn new(full: &FockBasis, m: usize) -> Result<Self> {
        let n = full.n_modes();
        if m > n {
            return Err(FockError::SplitOutOfRange { m, n_modes: n });
        }
        let big_j = full.max_level();
        let past = FockBasis::shared(m, big_j)?;
        let future = FockBasis::shared(n - m, big_j)?;
        let mut embed = Vec::with_capacity(big_j + 1);
        for j in 0..=big_j {
            let mut per_r = Vec::with_capacity(j + 1);
            for r in 0..=j {
                let mut per_phi = Vec::with_capacity(future.dim(r));
                for phi in future.level(r) {
                    let mut idx = Vec::with_capacity(past.dim(j - r));
                    for alpha in past.level(j - r) {
                        let mut occ = alpha.occupation().to_vec();
                        occ.extend_from_slice(phi.occupation());
                        idx.push(full.index_of(&occ).expect("split occupation in basis"));
                    }
                    per_phi.push(idx);
                }
                per_r.push(per_phi);
            }
            embed.push(per_r);
        }
        Ok(Self {
            n_modes: n,
            m,
            max_level: big_j,
            embed,
        })
    }

    pub fn shared(full: &FockBasis, m: usize) -> Result<Arc<ModeSplit>> {
        let key = (full.n_modes(), full.max_level(), m);
        if let Some(s) = split_cache().lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(Self::new(full, m)?);
        Ok(split_cache()
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(s)
            .clone())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn split(&self) -> usize {
        self.m
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Number of future states at level `r`.
    pub fn future_dim(&self, j: usize, r: usize) -> usize {
        self.embed[j][r].len()
    }

    /// Full level-`j` indices of `(α, φ)` for all past states `α` at level
    /// `j - r`, with `φ` the `phi`-th future state at level `r`.
    pub fn embedding(&self, j: usize, r: usize, phi: usize) -> &[usize] {
        &self.embed[j][r][phi]
    }
}
