use std::sync::Arc;

use fock_core::{FockBasis, StateVector};
use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2};

use crate::linalg::{self, Mat, ONE, ZERO};
use crate::{CmxError, Result, C64};

/// Block operator `[T^i_j]` on the truncated Fock space of `basis`, with
/// `T^i_j` mapping level `j` to level `i`. Absent blocks are zero.
#[derive(Debug, Clone)]
pub struct ChaosMatrix {
    basis: Arc<FockBasis>,
    blocks: Vec<Option<Mat>>,
    band: Option<usize>,
    truncated: bool,
}

impl ChaosMatrix {
    pub fn zeros(basis: Arc<FockBasis>, band: Option<usize>) -> Self {
        let n = basis.max_level() + 1;
        Self {
            basis,
            blocks: vec![None; n * n],
            band,
            truncated: false,
        }
    }

    pub fn identity(basis: Arc<FockBasis>) -> Self {
        Self::scalar(basis, ONE)
    }

    pub fn scalar(basis: Arc<FockBasis>, c: C64) -> Self {
        let mut t = Self::zeros(basis, Some(0));
        for j in 0..=t.max_level() {
            let d = t.basis.dim(j);
            t.put(j, j, Array2::from_diag_elem(d, c));
        }
        t
    }

    /// Split a dense level-major matrix into blocks; the band is inferred
    /// from the nonzero blocks.
    pub fn from_dense(basis: Arc<FockBasis>, dense: &Mat) -> Result<Self> {
        let off = basis.offsets();
        let total = *off.last().unwrap();
        if dense.dim() != (total, total) {
            return Err(CmxError::Structure(format!(
                "dense matrix {:?} does not match dimension {total}",
                dense.dim()
            )));
        }
        let mut t = Self::zeros(basis, None);
        for i in 0..=t.max_level() {
            for j in 0..=t.max_level() {
                let blk = dense.slice(s![off[i]..off[i + 1], off[j]..off[j + 1]]);
                if blk.iter().any(|z| *z != ZERO) {
                    t.put(i, j, blk.to_owned());
                }
            }
        }
        t.band = Some(t.stored_band());
        Ok(t)
    }

    pub fn to_dense(&self) -> Mat {
        self.dense_upto(self.max_level())
    }

    /// Dense compression to levels `0..=level`.
    pub fn dense_upto(&self, level: usize) -> Mat {
        let level = level.min(self.max_level());
        let off = self.basis.offsets();
        let n = off[level + 1];
        let mut d = Array2::zeros((n, n));
        for i in 0..=level {
            for j in 0..=level {
                if let Some(b) = self.block(i, j) {
                    d.slice_mut(s![off[i]..off[i + 1], off[j]..off[j + 1]])
                        .assign(b);
                }
            }
        }
        d
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes()
    }

    pub fn max_level(&self) -> usize {
        self.basis.max_level()
    }

    pub fn dim(&self, level: usize) -> usize {
        self.basis.dim(level)
    }

    pub fn band(&self) -> Option<usize> {
        self.band
    }

    /// Largest `|i - j|` over stored blocks.
    pub fn stored_band(&self) -> usize {
        let n = self.max_level() + 1;
        (0..n * n)
            .filter(|&k| self.blocks[k].is_some())
            .map(|k| (k / n).abs_diff(k % n))
            .max()
            .unwrap_or(0)
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.max_level() + 1) + j
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&Mat> {
        if i > self.max_level() || j > self.max_level() {
            return None;
        }
        self.blocks[self.idx(i, j)].as_ref()
    }

    pub fn block_or_zero(&self, i: usize, j: usize) -> Mat {
        self.block(i, j)
            .cloned()
            .unwrap_or_else(|| Array2::zeros((self.dim(i), self.dim(j))))
    }

    /// Mutable block, allocated as zero if absent.
    pub fn block_mut(&mut self, i: usize, j: usize) -> Result<&mut Mat> {
        self.check_band(i, j)?;
        let (di, dj) = (self.dim(i), self.dim(j));
        let k = self.idx(i, j);
        Ok(self.blocks[k].get_or_insert_with(|| Array2::zeros((di, dj))))
    }

    pub fn set_block(&mut self, i: usize, j: usize, b: Mat) -> Result<()> {
        self.check_band(i, j)?;
        if b.dim() != (self.dim(i), self.dim(j)) {
            return Err(CmxError::Structure(format!(
                "block ({i}, {j}) has shape {:?}, expected {:?}",
                b.dim(),
                (self.dim(i), self.dim(j))
            )));
        }
        self.put(i, j, b);
        Ok(())
    }

    pub fn clear_block(&mut self, i: usize, j: usize) {
        let k = self.idx(i, j);
        self.blocks[k] = None;
    }

    fn put(&mut self, i: usize, j: usize, b: Mat) {
        let k = self.idx(i, j);
        self.blocks[k] = Some(b);
    }

    fn check_band(&self, i: usize, j: usize) -> Result<()> {
        if i > self.max_level() || j > self.max_level() {
            return Err(CmxError::Structure(format!(
                "block ({i}, {j}) beyond the cutoff"
            )));
        }
        match self.band {
            Some(k) if i.abs_diff(j) > k => Err(CmxError::Band { i, j, band: k }),
            _ => Ok(()),
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n_modes() != other.n_modes() || self.max_level() != other.max_level() {
            return Err(CmxError::Structure(format!(
                "incompatible spaces: ({}, {}) vs ({}, {})",
                self.n_modes(),
                self.max_level(),
                other.n_modes(),
                other.max_level()
            )));
        }
        Ok(())
    }

    /// Iterator over stored blocks as `(i, j, block)`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &Mat)> {
        let n = self.max_level() + 1;
        self.blocks
            .iter()
            .enumerate()
            .filter_map(move |(k, b)| b.as_ref().map(|b| (k / n, k % n, b)))
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: C64, other: &Self) -> Result<()> {
        self.same_space(other)?;
        self.band = match (self.band, other.band) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let n = self.max_level() + 1;
        for k in 0..n * n {
            if let Some(ob) = &other.blocks[k] {
                match &mut self.blocks[k] {
                    Some(b) => b.scaled_add(c, ob),
                    slot @ None => *slot = Some(ob.mapv(|z| z * c)),
                }
            }
        }
        self.truncated |= other.truncated;
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.add_scaled(ONE, other)?;
        Ok(r)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.add_scaled(-ONE, other)?;
        Ok(r)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut r = self.clone();
        for b in r.blocks.iter_mut().flatten() {
            b.mapv_inplace(|z| z * c);
        }
        r
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `(ST)^i_j = Σ_ν S^i_ν T^ν_j`, truncated at `J`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_upto(other, self.max_level())
    }

    /// Product restricted to output blocks with `i, j ≤ level`; the sum over
    /// the inner level still runs over `0..=J`.
    pub fn mul_upto(&self, other: &Self, level: usize) -> Result<Self> {
        self.same_space(other)?;
        let big_j = self.max_level();
        let level = level.min(big_j);
        let band = match (self.band, other.band) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let mut out = Self::zeros(self.basis.clone(), band);
        for i in 0..=level {
            for j in 0..=level {
                let mut acc: Option<Mat> = None;
                for nu in 0..=big_j {
                    if let (Some(a), Some(b)) = (self.block(i, nu), other.block(nu, j)) {
                        let c = acc.get_or_insert_with(|| Array2::zeros((a.nrows(), b.ncols())));
                        general_mat_mul(ONE, a, b, ONE, c);
                    }
                }
                if let Some(c) = acc {
                    out.put(i, j, c);
                }
            }
        }
        out.truncated = self.truncated || other.truncated;
        Ok(out)
    }

    /// `(T*)^j_i = (T^i_j)*`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.basis.clone(), self.band);
        for (i, j, b) in self.blocks() {
            out.put(j, i, linalg::adjoint(&b.view()));
        }
        out.truncated = self.truncated;
        out
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(&self.basis);
        for (i, j, b) in self.blocks() {
            let y = out.level_mut(i);
            for (r, row) in b.rows().into_iter().enumerate() {
                y[r] += row
                    .iter()
                    .zip(psi.level(j))
                    .map(|(a, x)| a * x)
                    .sum::<C64>();
            }
        }
        out
    }

    /// Compression to levels `0..=level` (blocks above are dropped).
    pub fn compress(&self, level: usize) -> Self {
        let mut out = self.clone();
        for (i, j) in self.block_indices() {
            if i > level || j > level {
                out.clear_block(i, j);
            }
        }
        out
    }

    fn block_indices(&self) -> Vec<(usize, usize)> {
        self.blocks().map(|(i, j, _)| (i, j)).collect()
    }

    pub fn block_norm(&self, i: usize, j: usize) -> f64 {
        self.block(i, j).map_or(0.0, |b| linalg::op_norm(&b.view()))
    }

    /// Table of block operator norms.
    pub fn block_norms(&self) -> Array2<f64> {
        let n = self.max_level() + 1;
        let mut t = Array2::zeros((n, n));
        for (i, j, b) in self.blocks() {
            t[[i, j]] = linalg::op_norm(&b.view());
        }
        t
    }

    /// Operator norm of the compression to levels `0..=level`.
    pub fn op_norm_upto(&self, level: usize) -> f64 {
        linalg::op_norm(&self.dense_upto(level).view())
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm_upto(self.max_level())
    }

    /// Largest entry modulus over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks()
            .fold(0.0, |m, (_, _, b)| m.max(linalg::max_abs(&b.view())))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Frobenius norm of `T - T*`; an upper bound on its operator norm.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.max_level() + 1;
        let mut acc = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = match (self.block(i, j), self.block(j, i)) {
                    (Some(a), Some(b)) => {
                        linalg::frobenius(&(a - &linalg::adjoint(&b.view())).view())
                    }
                    (Some(a), None) | (None, Some(a)) => linalg::frobenius(&a.view()),
                    (None, None) => 0.0,
                };
                acc += if i == j { d * d } else { 2.0 * d * d };
            }
        }
        acc.sqrt()
    }

    /// Drop blocks whose entries are all exactly zero.
    pub fn prune(&mut self) {
        for b in self.blocks.iter_mut() {
            if b.as_ref().is_some_and(|m| m.iter().all(|z| *z == ZERO)) {
                *b = None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{annihilator, creator};
    use fock_core::exponential_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(n: usize, j: usize) -> Arc<FockBasis> {
        FockBasis::shared(n, j).unwrap()
    }

    fn random_banded(b: &Arc<FockBasis>, band: usize, seed: u64) -> ChaosMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = ChaosMatrix::zeros(b.clone(), Some(band));
        for i in 0..=b.max_level() {
            for j in 0..=b.max_level() {
                if i.abs_diff(j) <= band {
                    t.set_block(i, j, linalg::random_matrix(b.dim(i), b.dim(j), &mut rng))
                        .unwrap();
                }
            }
        }
        t
    }

    #[test]
    fn identity_is_neutral() {
        let b = basis(3, 3);
        let t = random_banded(&b, 1, 1);
        let id = ChaosMatrix::identity(b);
        assert_eq!(id.mul(&t).unwrap().max_abs_diff(&t).unwrap(), 0.0);
        assert_eq!(t.mul(&id).unwrap().max_abs_diff(&t).unwrap(), 0.0);
    }

    #[test]
    fn band_arithmetic() {
        let b = basis(2, 4);
        let s = random_banded(&b, 1, 2);
        let t = random_banded(&b, 1, 3);
        let p = s.mul(&t).unwrap();
        assert_eq!(p.band(), Some(2));
        assert!(p.stored_band() <= 2);
    }

    #[test]
    fn product_matches_dense() {
        let b = basis(2, 3);
        let s = random_banded(&b, 1, 4);
        let t = random_banded(&b, 2, 5);
        let p = s.mul(&t).unwrap().to_dense();
        let d = s.to_dense().dot(&t.to_dense());
        assert!(linalg::max_abs(&(&p - &d).view()) < 1e-12);
    }

    #[test]
    fn annihilation_times_creation_on_vacuum() {
        // a(f) a†(f) on the vacuum block gives ‖f‖².
        let b = basis(1, 3);
        let a = annihilator(&b, 0).unwrap();
        let c = creator(&b, 0).unwrap();
        let p = a.mul(&c).unwrap();
        assert_eq!(p.block(0, 0).unwrap()[[0, 0]], ONE);
    }

    #[test]
    fn adjoint_is_involution_and_contravariant() {
        let b = basis(3, 3);
        let s = random_banded(&b, 1, 6);
        let t = random_banded(&b, 2, 7);
        assert_eq!(s.adjoint().adjoint().max_abs_diff(&s).unwrap(), 0.0);
        let lhs = s.mul(&t).unwrap().adjoint();
        let rhs = t.adjoint().mul(&s.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-13);
    }

    #[test]
    fn band_violation_is_an_error() {
        let b = basis(2, 3);
        let mut t = ChaosMatrix::zeros(b.clone(), Some(0));
        assert!(matches!(
            t.set_block(0, 1, Array2::zeros((1, 2))),
            Err(CmxError::Band { .. })
        ));
        assert!(t.set_block(1, 1, Array2::zeros((3, 3))).is_err());
        let other = ChaosMatrix::zeros(basis(3, 3), None);
        assert!(t.mul(&other).is_err());
    }

    #[test]
    fn apply_matches_dense_and_restricted_product() {
        let b = basis(3, 3);
        let t = random_banded(&b, 1, 8);
        let g = [C64::new(0.2, 0.1), C64::new(-0.3, 0.0), C64::new(0.0, 0.4)];
        let e = exponential_vector(&b, &g).unwrap();
        let y = t.apply(&e).to_flat();
        let d = t.to_dense().dot(&ndarray::Array1::from(e.to_flat()));
        for (a, b) in y.iter().zip(d.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
        let s = random_banded(&b, 1, 9);
        let full = s.mul(&t).unwrap().compress(1);
        let part = s.mul_upto(&t, 1).unwrap();
        assert!(full.max_abs_diff(&part).unwrap() < 1e-14);
    }

    #[test]
    fn dense_round_trip_and_hermitian_defect() {
        let b = basis(2, 2);
        let t = random_banded(&b, 1, 10);
        let r = ChaosMatrix::from_dense(b.clone(), &t.to_dense()).unwrap();
        assert_eq!(r.max_abs_diff(&t).unwrap(), 0.0);
        let h = t.add(&t.adjoint()).unwrap();
        assert!(h.hermitian_defect() < 1e-14);
        assert!(t.hermitian_defect() > 0.1);
    }
}
