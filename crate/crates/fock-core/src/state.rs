use crate::{FockBasis, FockError, Result, C64};

/// Chaos representation `(ψ⁰, ψ¹, …, ψ^J)` in the occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    levels: Vec<Vec<C64>>,
}

impl StateVector {
    pub fn zeros(basis: &FockBasis) -> Self {
        let levels = (0..=basis.max_level())
            .map(|j| vec![C64::new(0.0, 0.0); basis.dim(j)])
            .collect();
        Self { levels }
    }

    pub fn vacuum(basis: &FockBasis) -> Self {
        let mut v = Self::zeros(basis);
        v.levels[0][0] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_levels(levels: Vec<Vec<C64>>) -> Self {
        Self { levels }
    }

    /// Flattened level-major vector, the inverse of [`StateVector::from_flat`].
    pub fn to_flat(&self) -> Vec<C64> {
        self.levels.iter().flatten().copied().collect()
    }

    pub fn from_flat(basis: &FockBasis, flat: &[C64]) -> Self {
        let off = basis.offsets();
        let levels = (0..=basis.max_level())
            .map(|j| flat[off[j]..off[j + 1]].to_vec())
            .collect();
        Self { levels }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, j: usize) -> &[C64] {
        &self.levels[j]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut Vec<C64> {
        &mut self.levels[j]
    }

    pub fn levels(&self) -> &[Vec<C64>] {
        &self.levels
    }

    pub fn norm_sqr(&self) -> f64 {
        self.levels.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩`, linear in `self` and conjugate-linear in `other`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.levels
            .iter()
            .zip(&other.levels)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
    }

    pub fn axpy(&mut self, a: C64, x: &Self) {
        for (l, xl) in self.levels.iter_mut().zip(&x.levels) {
            for (v, xv) in l.iter_mut().zip(xl) {
                *v += a * xv;
            }
        }
    }

    pub fn scale(&mut self, a: C64) {
        self.levels.iter_mut().flatten().for_each(|v| *v *= a);
    }

    /// Highest level carrying a nonzero amplitude.
    pub fn support_level(&self) -> Option<usize> {
        (0..self.levels.len())
            .rev()
            .find(|&j| self.levels[j].iter().any(|z| *z != C64::new(0.0, 0.0)))
    }
}

/// Truncated exponential vector `e(g)`: amplitude `∏ g_k^{ν_k} / √(ν_k!)` at
/// occupation `ν`, levels above `J` dropped.
pub fn exponential_vector(basis: &FockBasis, g: &[C64]) -> Result<StateVector> {
    if g.len() != basis.n_modes() {
        return Err(FockError::AmplitudeLength {
            expected: basis.n_modes(),
            got: g.len(),
        });
    }
    let levels = (0..=basis.max_level())
        .map(|j| {
            basis
                .level(j)
                .iter()
                .map(|o| {
                    o.occupation()
                        .iter()
                        .zip(g)
                        .fold(C64::new(1.0, 0.0), |acc, (&v, &gk)| {
                            if v == 0 {
                                acc
                            } else {
                                acc * gk.powu(v) / factorial(v).sqrt()
                            }
                        })
                })
                .collect()
        })
        .collect();
    Ok(StateVector { levels })
}

/// Zero every component above level `J - b`.
pub fn buffered_projection(psi: &StateVector, max_level: usize, buffer: usize) -> StateVector {
    let keep = max_level.saturating_sub(buffer);
    let mut out = psi.clone();
    for (j, l) in out.levels.iter_mut().enumerate() {
        if j > keep {
            l.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn zero_amplitudes_give_vacuum() {
        let b = FockBasis::new(3, 4).unwrap();
        let e = exponential_vector(&b, &[c(0.0); 3]).unwrap();
        assert_eq!(e, StateVector::vacuum(&b));
    }

    #[test]
    fn single_mode_amplitudes() {
        let b = FockBasis::new(1, 2).unwrap();
        let e = exponential_vector(&b, &[c(1.0)]).unwrap();
        assert_eq!(e.level(0), &[c(1.0)]);
        assert_eq!(e.level(1), &[c(1.0)]);
        assert!((e.level(2)[0] - c(1.0 / 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn unit_vector_inner_product_is_partial_e() {
        let b = FockBasis::new(4, 5).unwrap();
        let g = [c(0.5), C64::new(0.0, 0.5), c(-0.5), C64::new(0.5, 0.0)];
        let e = exponential_vector(&b, &g).unwrap();
        let expected = 1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 24.0 + 1.0 / 120.0;
        assert!((e.inner(&e).re - expected).abs() < 1e-12);
        assert!((expected - 2.716_666_666_666_667).abs() < 1e-12);
    }

    #[test]
    fn inner_product_of_distinct_exponentials() {
        let b = FockBasis::new(3, 4).unwrap();
        let g = [C64::new(0.3, 0.1), c(-0.2), C64::new(0.0, 0.7)];
        let h = [c(0.4), C64::new(0.1, -0.5), C64::new(0.2, 0.2)];
        let gh: C64 = g.iter().zip(&h).map(|(x, y)| x * y.conj()).sum();
        let expected: C64 = (0..=4).map(|j| gh.powu(j) / factorial(j)).sum();
        let got = exponential_vector(&b, &g)
            .unwrap()
            .inner(&exponential_vector(&b, &h).unwrap());
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn buffered_projection_examples() {
        let b = FockBasis::new(2, 5).unwrap();
        let g = [c(0.6), c(0.8)];
        let e = exponential_vector(&b, &g).unwrap();
        assert_eq!(buffered_projection(&e, 5, 0), e);
        let vac = StateVector::vacuum(&b);
        assert_eq!(buffered_projection(&vac, 5, 3), vac);
        let p = buffered_projection(&e, 5, 2);
        assert_eq!(p.support_level(), Some(3));
        let expected = 1.0 + 1.0 + 0.5 + 1.0 / 6.0;
        assert!((p.norm_sqr() - expected).abs() < 1e-12);
    }

    #[test]
    fn wrong_amplitude_length() {
        let b = FockBasis::new(3, 2).unwrap();
        assert!(exponential_vector(&b, &[c(1.0)]).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let b = FockBasis::new(3, 3).unwrap();
        let e = exponential_vector(&b, &[c(0.1), c(0.2), c(0.3)]).unwrap();
        assert_eq!(StateVector::from_flat(&b, &e.to_flat()), e);
    }
}
