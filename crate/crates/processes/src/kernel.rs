use std::f64::consts::PI;
use std::sync::Arc;

use cmx::linalg::{self, Mat};
use cmx::ChaosMatrix;
use fock_core::{FockBasis, GridConfig};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{CmxProcess, ProcessError, Result, C64};

/// Base blocks `B^i_j` before compression to the past.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum KernelBase {
    /// `B^i_i = I`, off-diagonal blocks zero.
    Identity,
    /// Blocks from second-quantised smooth one-particle data: a Hermitian
    /// integral kernel `h(x, y)` and vectors `φ_1, …, φ_k` spanned by
    /// `e^{2πirx}`, `|r| ≤ fourier_modes`, with seeded coefficients and unit
    /// norm. `B^i_i = dΓ(h)/i`, `B^{i-q}_i = a(φ_q)^q / √(i!/(i-q)!)`, and
    /// `B^i_{i-q}` the adjoint, so every block has norm at most one and the
    /// same continuum operator is compressed at every grid size.
    SecondQuantized { seed: u64, fourier_modes: usize },
}

/// Coefficient functions `c^i_j(t)` with `c^i_j = conj(c^j_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientRule {
    /// `c^i_j ≡ value` on the band.
    Constant { value: f64 },
    /// `c^i_i(t) = ξ cos(2πt + θ_i)`, `c^i_j(t) = ξ e^{iψ_ij} sin(2πt + θ_ij)`
    /// for `i < j`, with seeded phases.
    Seeded { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub band: usize,
    pub xi: f64,
    pub base: KernelBase,
    pub coefficients: CoefficientRule,
}

impl KernelSpec {
    pub fn seeded(band: usize, xi: f64, seed: u64) -> Self {
        Self {
            band,
            xi,
            base: KernelBase::SecondQuantized {
                seed,
                fourier_modes: 2,
            },
            coefficients: CoefficientRule::Seeded {
                seed: seed.wrapping_add(0x9e37),
            },
        }
    }

    pub fn identity() -> Self {
        Self {
            band: 0,
            xi: 1.0,
            base: KernelBase::Identity,
            coefficients: CoefficientRule::Constant { value: 1.0 },
        }
    }

    fn validate(&self, max_level: usize) -> Result<()> {
        if self.band > max_level {
            return Err(ProcessError::Kernel(format!(
                "band {} exceeds the cutoff {max_level}",
                self.band
            )));
        }
        if self.xi.is_nan() || self.xi < 0.0 {
            return Err(ProcessError::Kernel("bound ξ must be nonnegative".into()));
        }
        if let CoefficientRule::Constant { value } = self.coefficients {
            if value.abs() > self.xi {
                return Err(ProcessError::Kernel(format!(
                    "|c| = {} exceeds ξ = {}",
                    value.abs(),
                    self.xi
                )));
            }
        }
        Ok(())
    }

    /// `c^i_j(t)`.
    pub fn coefficient(&self, i: usize, j: usize, t: f64) -> C64 {
        if i.abs_diff(j) > self.band {
            return C64::new(0.0, 0.0);
        }
        match self.coefficients {
            CoefficientRule::Constant { value } => C64::new(value, 0.0),
            CoefficientRule::Seeded { seed } => {
                let (lo, hi) = (i.min(j), i.max(j));
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((lo as u64) << 32 | hi as u64));
                let theta = 2.0 * PI * rng.random::<f64>();
                if lo == hi {
                    return C64::new(self.xi * (2.0 * PI * t + theta).cos(), 0.0);
                }
                let psi = 2.0 * PI * rng.random::<f64>();
                let c = C64::from_polar(self.xi * (2.0 * PI * t + theta).sin(), psi);
                if i < j {
                    c
                } else {
                    c.conj()
                }
            }
        }
    }
}

/// One-particle data of a second-quantised base, projected on bin steps.
struct OneParticle {
    h: Mat,
    phis: Vec<Vec<C64>>,
}

fn fourier_bin_integral(r: i64, k: usize, dt: f64) -> C64 {
    if r == 0 {
        return C64::new(dt, 0.0);
    }
    let w = 2.0 * PI * r as f64;
    let a = C64::from_polar(1.0, w * (k as f64 + 1.0) * dt);
    let b = C64::from_polar(1.0, w * k as f64 * dt);
    (a - b) / C64::new(0.0, w)
}

fn one_particle(
    seed: u64,
    fourier_modes: usize,
    band: usize,
    grid: GridConfig,
) -> Result<OneParticle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = 2 * fourier_modes + 1;
    let c = linalg::random_hermitian(nf, &mut rng);
    let c = c.mapv(|z| z / linalg::op_norm(&c.view()).max(1e-300));
    let ds: Vec<Array1<C64>> = (0..band)
        .map(|_| {
            let d: Array1<C64> = linalg::random_matrix(nf, 1, &mut rng).column(0).to_owned();
            let n = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            d.mapv(|z| z / n)
        })
        .collect();
    let n = grid.n_bins();
    let dt = grid.dt();
    let rs: Vec<i64> = (-(fourier_modes as i64)..=fourier_modes as i64).collect();
    // E[k, r] = ∫_bin_k e^{2πirx} dx
    let e = Array2::from_shape_fn((n, nf), |(k, ri)| fourier_bin_integral(rs[ri], k, dt));
    let eh = linalg::adjoint(&e.view());
    let h = e.dot(&c).dot(&eh).mapv(|z| z / dt);
    let phis = ds
        .iter()
        .map(|d| e.dot(d).iter().map(|z| z / dt.sqrt()).collect())
        .collect();
    Ok(OneParticle { h, phis })
}

/// `dΓ(h) = Σ h_kl a_k† a_l` on the first `m` modes.
fn dgamma(basis: &Arc<FockBasis>, h: &Mat) -> Result<ChaosMatrix> {
    let m = basis.n_modes();
    let mut t = ChaosMatrix::zeros(basis.clone(), Some(0));
    for j in 0..=basis.max_level() {
        let mut blk = Array2::zeros((basis.dim(j), basis.dim(j)));
        for (col, o) in basis.level(j).iter().enumerate() {
            let occ = o.occupation();
            for l in 0..m {
                if occ[l] == 0 {
                    continue;
                }
                let mut mid = occ.to_vec();
                mid[l] -= 1;
                let fl = (occ[l] as f64).sqrt();
                for k in 0..m {
                    let mut out = mid.clone();
                    out[k] += 1;
                    let fk = (out[k] as f64).sqrt();
                    let row = basis.index_of(&out).expect("level preserved");
                    blk[[row, col]] += h[[k, l]] * fl * fk;
                }
            }
        }
        t.set_block(j, j, blk)?;
    }
    Ok(t)
}

/// `a(φ) = Σ conj(φ_k) a_k` on the first `m` modes.
fn smeared_annihilator(basis: &Arc<FockBasis>, phi: &[C64]) -> Result<ChaosMatrix> {
    let mut t = ChaosMatrix::zeros(basis.clone(), Some(1));
    for (k, p) in phi.iter().enumerate().take(basis.n_modes()) {
        t.add_scaled(p.conj(), &cmx::annihilator(basis, k)?)?;
    }
    Ok(t)
}

fn falling(i: usize, q: usize) -> f64 {
    (0..q).map(|r| (i - r) as f64).product()
}

fn base_on(
    spec: &KernelSpec,
    op: Option<&OneParticle>,
    basis: &Arc<FockBasis>,
) -> Result<ChaosMatrix> {
    let big_j = basis.max_level();
    let m = basis.n_modes();
    match (&spec.base, op) {
        (KernelBase::Identity, _) => Ok(ChaosMatrix::identity(basis.clone())),
        (KernelBase::SecondQuantized { .. }, Some(op)) => {
            let mut b = ChaosMatrix::zeros(basis.clone(), Some(spec.band));
            let hm = linalg::corner(&op.h, m, m);
            let dg = dgamma(basis, &hm)?;
            b.set_block(0, 0, Array2::from_diag_elem(1, C64::new(1.0, 0.0)))?;
            for i in 1..=big_j {
                b.set_block(i, i, dg.block_or_zero(i, i).mapv(|z| z / i as f64))?;
            }
            for (q0, phi) in op.phis.iter().enumerate() {
                let q = q0 + 1;
                let a = smeared_annihilator(basis, &phi[..m])?;
                let mut aq = a.clone();
                for _ in 1..q {
                    aq = aq.mul(&a)?;
                }
                for i in q..=big_j {
                    let blk = aq
                        .block_or_zero(i - q, i)
                        .mapv(|z| z / falling(i, q).sqrt());
                    b.set_block(i, i - q, linalg::adjoint(&blk.view()))?;
                    b.set_block(i - q, i, blk)?;
                }
            }
            Ok(b)
        }
        (KernelBase::SecondQuantized { .. }, None) => unreachable!("one-particle data prepared"),
    }
}

/// Adapted banded process: at `t_m` the past blocks are
/// `c^i_j(t_m) B^i_j` compressed to the first `m` bins.
pub fn kernel_process(spec: &KernelSpec, grid: GridConfig, max_level: usize) -> Result<CmxProcess> {
    spec.validate(max_level)?;
    let op = match spec.base {
        KernelBase::SecondQuantized {
            seed,
            fourier_modes,
        } => Some(one_particle(seed, fourier_modes, spec.band, grid)?),
        KernelBase::Identity => None,
    };
    CmxProcess::from_fn(grid, max_level, |m, basis| {
        let t = grid.time(m);
        let b = base_on(spec, op.as_ref(), basis)?;
        let mut k = ChaosMatrix::zeros(basis.clone(), Some(spec.band));
        for (i, j, blk) in b.blocks() {
            let c = spec.coefficient(i, j, t);
            if c != C64::new(0.0, 0.0) {
                k.set_block(i, j, blk.mapv(|z| z * c))?;
            }
        }
        Ok(k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_give_zero() {
        let grid = GridConfig::new(3).unwrap();
        let mut spec = KernelSpec::seeded(1, 1.0, 5);
        spec.coefficients = CoefficientRule::Constant { value: 0.0 };
        assert!(kernel_process(&spec, grid, 3).unwrap().is_zero());
    }

    #[test]
    fn identity_spec_gives_identity() {
        let grid = GridConfig::new(3).unwrap();
        let p = kernel_process(&KernelSpec::identity(), grid, 3).unwrap();
        for m in 0..=3 {
            let d = p.sample_full(m).unwrap();
            let id = ChaosMatrix::identity(FockBasis::shared(3, 3).unwrap());
            assert_eq!(d.max_abs_diff(&id).unwrap(), 0.0);
        }
    }

    #[test]
    fn seeded_band_one_is_adapted_and_symmetric() {
        let grid = GridConfig::new(4).unwrap();
        let p = kernel_process(&KernelSpec::seeded(1, 0.8, 42), grid, 4).unwrap();
        assert!(p.validate_adapted().unwrap() <= 1e-12);
        assert!(p.max_abs_diff(&p.adjoint().unwrap()).unwrap() <= 1e-12);
        assert!(p.band() <= 1);
        assert!(!p.is_zero());
    }

    #[test]
    fn block_norms_bounded_by_xi() {
        let grid = GridConfig::new(4).unwrap();
        for band in 0..=2 {
            let p = kernel_process(&KernelSpec::seeded(band, 0.7, 9), grid, 4).unwrap();
            for m in 0..=4 {
                assert!(p.block_norms(m).iter().all(|&x| x <= 0.7 + 1e-12));
            }
        }
    }

    #[test]
    fn band_beyond_cutoff_is_rejected() {
        let grid = GridConfig::new(2).unwrap();
        assert!(kernel_process(&KernelSpec::seeded(3, 1.0, 1), grid, 2).is_err());
        let mut spec = KernelSpec::seeded(1, 0.5, 1);
        spec.coefficients = CoefficientRule::Constant { value: 0.9 };
        assert!(kernel_process(&spec, grid, 2).is_err());
    }

    #[test]
    fn bin_projection_is_refinement_consistent() {
        // Summing fine-bin projections over pairs reproduces the coarse ones.
        let coarse = one_particle(3, 2, 1, GridConfig::new(2).unwrap()).unwrap();
        let fine = one_particle(3, 2, 1, GridConfig::new(4).unwrap()).unwrap();
        let s = (2f64).sqrt();
        for k in 0..2 {
            let merged = (fine.phis[0][2 * k] + fine.phis[0][2 * k + 1]) / s;
            assert!((merged - coarse.phis[0][k]).norm() < 1e-14);
            for l in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        acc += fine.h[[2 * k + a, 2 * l + b]];
                    }
                }
                assert!((acc / 2.0 - coarse.h[[k, l]]).norm() < 1e-14);
            }
        }
    }
}
