use std::sync::Arc;

use fock_core::{mode_ladder, FockBasis, LadderKind};

use crate::{CmxError, Result, C64};

/// Discrete gradient `D_k = a_k / √dt` and Skorohod map
/// `S_m φ = √dt Σ_{k<m} a_k† φ_k` on bin-step one-particle data.
#[derive(Debug, Clone)]
pub struct GradientStack {
    basis: Arc<FockBasis>,
    dt: f64,
}

impl GradientStack {
    pub fn new(basis: Arc<FockBasis>) -> Self {
        let dt = 1.0 / basis.n_modes().max(1) as f64;
        Self { basis, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `D_k ψ` for `ψ` in level `level` (`≥ 1`), landing in `level - 1`.
    pub fn gradient_apply(&self, k: usize, level: usize, psi: &[C64]) -> Result<Vec<C64>> {
        if level == 0 {
            return Ok(vec![]);
        }
        let lb = mode_ladder(&self.basis, LadderKind::Annihilate, k, level)?;
        let s = 1.0 / self.dt.sqrt();
        Ok(lb.apply(psi).into_iter().map(|z| z * s).collect())
    }

    /// `S_m φ` for a per-bin family `φ_k` of level-`level` vectors. Returns
    /// the level-`level + 1` image and whether truncation removed it.
    pub fn skorohod_apply(
        &self,
        m: usize,
        level: usize,
        phi: &[Vec<C64>],
    ) -> Result<(Vec<C64>, bool)> {
        let n = self.basis.n_modes();
        if m > n || phi.len() < m {
            return Err(CmxError::GridIndex { m, n_bins: n });
        }
        if level >= self.basis.max_level() {
            return Ok((vec![], true));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.basis.dim(level + 1)];
        let s = self.dt.sqrt();
        for (k, p) in phi.iter().enumerate().take(m) {
            let lb = mode_ladder(&self.basis, LadderKind::Create, k, level)?;
            for (o, y) in out.iter_mut().zip(lb.apply(p)) {
                *o += y * s;
            }
        }
        Ok((out, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(n: usize, rng: &mut impl Rng) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn gradient_of_vacuum_is_zero() {
        let b = FockBasis::shared(3, 3).unwrap();
        let g = GradientStack::new(b);
        assert!(g
            .gradient_apply(1, 0, &[C64::new(1.0, 0.0)])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn number_identity_two_bins_level_two() {
        let b = FockBasis::shared(2, 2).unwrap();
        let g = GradientStack::new(b.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut psi = rv(b.dim(2), &mut rng);
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= n);
        let total: f64 = (0..2)
            .map(|k| {
                g.dt()
                    * g.gradient_apply(k, 2, &psi)
                        .unwrap()
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
            })
            .sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn skorohod_is_adjoint_of_gradient() {
        let b = FockBasis::shared(4, 3).unwrap();
        let g = GradientStack::new(b.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for level in 0..3 {
            for m in 0..=4 {
                let phi: Vec<Vec<C64>> = (0..4).map(|_| rv(b.dim(level), &mut rng)).collect();
                let psi = rv(b.dim(level + 1), &mut rng);
                let (s, trunc) = g.skorohod_apply(m, level, &phi).unwrap();
                assert!(!trunc);
                let lhs: C64 = s.iter().zip(&psi).map(|(x, y)| x * y.conj()).sum();
                let rhs: C64 = (0..m)
                    .map(|k| {
                        let d = g.gradient_apply(k, level + 1, &psi).unwrap();
                        phi[k]
                            .iter()
                            .zip(&d)
                            .map(|(x, y)| x * y.conj())
                            .sum::<C64>()
                            * g.dt()
                    })
                    .sum();
                assert!((lhs - rhs).norm() <= 1e-14);
            }
        }
        assert!(g.skorohod_apply(2, 3, &[vec![], vec![]]).unwrap().1);
    }
}
