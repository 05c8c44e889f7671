use cmx::linalg::{self, Mat};
use cmx::ChaosMatrix;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::quadrature::{gauss_legendre_unit, integration_matrix, QuadratureConfig};
use crate::spectral::Spectral;
use crate::{CalculusError, Result, C64};

/// Largest phase change `(λ_max - λ_min)·h` allowed across one panel of
/// the refinement grid.
const PANEL_PHASE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelExpansion {
    /// `‖K⁽ⁿ⁾(1)‖`, `n = 0..=N`.
    pub kernel_norms: Vec<f64>,
    /// `‖J‖ⁿ / n!`.
    pub bounds: Vec<f64>,
    /// `‖e^{i(M+J)} - Σ_{k ≤ n} iᵏ K⁽ᵏ⁾(1)‖`.
    pub partial_residuals: Vec<f64>,
    /// `Σ_{k > n} ‖J‖ᵏ / k!`.
    pub tail_bounds: Vec<f64>,
    pub panels: usize,
}

impl DuhamelExpansion {
    /// Largest `‖K⁽ⁿ⁾(1)‖ - ‖J‖ⁿ/n!`.
    pub fn worst_bound_excess(&self) -> f64 {
        self.kernel_norms
            .iter()
            .zip(&self.bounds)
            .map(|(k, b)| k - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest partial-sum residual in excess of its tail bound.
    pub fn worst_tail_excess(&self) -> f64 {
        self.partial_residuals
            .iter()
            .zip(&self.tail_bounds)
            .map(|(r, t)| r - t)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Kernels of the Duhamel expansion `e^{i(M+J)} = Σ iⁿ K⁽ⁿ⁾(1)` with
/// `K⁽⁰⁾(s) = e^{isM}` and `K⁽ⁿ⁾(s) = ∫_0^s e^{i(s-u)M} J K⁽ⁿ⁻¹⁾(u) du`.
///
/// The recursion runs in the interaction picture `K⁽ⁿ⁾(s) = e^{isM} L⁽ⁿ⁾(s)`,
/// `L⁽ⁿ⁾(s) = ∫_0^s J(u) L⁽ⁿ⁻¹⁾(u) du`, `J(u) = e^{-iuM} J e^{iuM}`, on
/// composite Gauss–Legendre panels whose count grows with the spread of
/// the spectrum of `M`.
pub fn duhamel_expansion(
    m: &ChaosMatrix,
    jp: &ChaosMatrix,
    n_max: usize,
    quad: &QuadratureConfig,
) -> Result<DuhamelExpansion> {
    quad.validate()?;
    if (m.n_modes(), m.max_level()) != (jp.n_modes(), jp.max_level()) {
        return Err(CalculusError::Config(
            "M and J live on different Fock spaces".into(),
        ));
    }
    let s = Spectral::of(m)?;
    let sum = Spectral::of(&m.add(jp)?)?;
    let jd = jp.to_dense();
    let jt = s.sandwich(&jd, &s);
    let lam = &s.values;
    let d = lam.len();
    let spread = lam.last().zip(lam.first()).map_or(0.0, |(a, b)| a - b);
    let panels = ((spread / PANEL_PHASE).ceil() as usize).max(1);
    let h = 1.0 / panels as f64;
    let unit = gauss_legendre_unit(quad.u_order);
    let unit_nodes: Vec<f64> = unit.iter().map(|p| p.0).collect();
    let s_unit = integration_matrix(&unit_nodes);
    let nodes: Vec<f64> = (0..panels)
        .flat_map(|p| unit_nodes.iter().map(move |x| (p as f64 + x) * h))
        .collect();
    let q = nodes.len();
    let weight = |l: usize| h * unit[l % quad.u_order].1;
    // J(u) at every node.
    let jn: Vec<Mat> = nodes
        .iter()
        .map(|&u| {
            Array2::from_shape_fn((d, d), |(a, b)| {
                jt[[a, b]] * C64::from_polar(1.0, -u * (lam[a] - lam[b]))
            })
        })
        .collect();

    let j_norm = linalg::op_norm(&jd.view());
    let target = sum.apply_fn(|l| C64::from_polar(1.0, l));
    let e1 = s.apply_fn(|l| C64::from_polar(1.0, l));
    let mut partial = e1.clone();
    let mut kernel_norms = vec![1.0];
    let mut bounds = vec![1.0];
    let mut partial_residuals = vec![linalg::op_norm(&(&target - &partial).view())];
    let mut fact = 1.0;
    let mut prev: Vec<Mat> = vec![linalg::identity(d); q];
    let mut phase = C64::new(1.0, 0.0);
    for n in 1..=n_max {
        let prod: Vec<Mat> = jn.iter().zip(&prev).map(|(j, l)| j.dot(l)).collect();
        let mut next: Vec<Mat> = Vec::with_capacity(q);
        let mut carried: Mat = Array2::zeros((d, d));
        for p in 0..panels {
            let base = p * quad.u_order;
            for row in s_unit.iter().take(quad.u_order) {
                let mut acc = carried.clone();
                for (l, &w) in row.iter().enumerate().take(quad.u_order) {
                    acc.scaled_add(C64::new(h * w, 0.0), &prod[base + l]);
                }
                next.push(acc);
            }
            for l in 0..quad.u_order {
                carried.scaled_add(C64::new(weight(base + l), 0.0), &prod[base + l]);
            }
        }
        // `carried` now holds L⁽ⁿ⁾(1).
        let kn = e1.dot(&s.unsandwich(&carried, &s));
        fact *= n as f64;
        phase *= C64::new(0.0, 1.0);
        kernel_norms.push(linalg::op_norm(&kn.view()));
        bounds.push(j_norm.powi(n as i32) / fact);
        partial.scaled_add(phase, &kn);
        partial_residuals.push(linalg::op_norm(&(&target - &partial).view()));
        prev = next;
    }
    let tail_bounds = (0..=n_max)
        .map(|n| {
            let mut t = 0.0;
            let mut term = bounds[n];
            for k in n + 1..n + 200 {
                term *= j_norm / k as f64;
                t += term;
                if term < 1e-300 {
                    break;
                }
            }
            t
        })
        .collect();
    Ok(DuhamelExpansion {
        kernel_norms,
        bounds,
        partial_residuals,
        tail_bounds,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmx::FockBasis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(seed: u64, j_scale: f64) -> (ChaosMatrix, ChaosMatrix) {
        let b = FockBasis::shared(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = linalg::random_hermitian(b.total_dim(), &mut rng).mapv(|z| z * 2.0);
        let j = linalg::random_hermitian(b.total_dim(), &mut rng);
        let jn = linalg::op_norm(&j.view());
        let j = j.mapv(|z| z * (j_scale / jn));
        (
            ChaosMatrix::from_dense(b.clone(), &m).unwrap(),
            ChaosMatrix::from_dense(b, &j).unwrap(),
        )
    }

    #[test]
    fn zero_perturbation() {
        let (m, j) = pair(1, 1.0);
        let z = j.scale_real(0.0);
        let x = duhamel_expansion(&m, &z, 4, &QuadratureConfig::default()).unwrap();
        assert!(x.kernel_norms[1..].iter().all(|&k| k == 0.0));
        assert!(x.partial_residuals[0] < 1e-12);
    }

    #[test]
    fn bounds_and_convergence() {
        let (m, j) = pair(2, 1.0);
        let x = duhamel_expansion(&m, &j, 10, &QuadratureConfig::default()).unwrap();
        assert!(
            x.worst_bound_excess() <= 1e-8,
            "{:?} {:?}",
            x.kernel_norms,
            x.bounds
        );
        assert!(
            x.partial_residuals[10] <= x.tail_bounds[10] + 1e-8,
            "{:?}",
            x.partial_residuals
        );
        assert!(x.worst_tail_excess() <= 1e-8);
    }

    #[test]
    fn commuting_case_is_exact() {
        // J = cM commutes with M: K⁽ⁿ⁾(1) = (cM)ⁿ e^{iM}/n!.
        let (m, _) = pair(3, 1.0);
        let c = 0.3 / m.op_norm();
        let x = duhamel_expansion(&m, &m.scale_real(c), 3, &QuadratureConfig::default()).unwrap();
        assert!((x.kernel_norms[2] - 0.09 / 2.0).abs() < 1e-12);
    }
}
