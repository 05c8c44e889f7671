use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::{CalculusError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Gauss–Legendre points on `[0, 1]`.
    pub u_order: usize,
    /// Fourier variable range `[-p_max, p_max]`.
    pub p_max: f64,
    /// Composite-trapezoid points in `p` (odd, so `p = 0` is a node).
    pub p_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            u_order: 16,
            p_max: 12.0,
            p_points: 241,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.u_order < 2 || self.p_points < 3 {
            return Err(CalculusError::Config(
                "quadrature orders must be at least 2".into(),
            ));
        }
        if self.p_points.is_multiple_of(2) {
            return Err(CalculusError::Config("p_points must be odd".into()));
        }
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(CalculusError::Config("p_max must be positive".into()));
        }
        Ok(())
    }

    /// `(p_j, w_j)` of the composite trapezoid rule.
    pub fn p_rule(&self) -> Vec<(f64, f64)> {
        let h = 2.0 * self.p_max / (self.p_points - 1) as f64;
        (0..self.p_points)
            .map(|j| {
                let w = if j == 0 || j + 1 == self.p_points {
                    0.5 * h
                } else {
                    h
                };
                (-self.p_max + j as f64 * h, w)
            })
            .collect()
    }

    pub fn u_rule(&self) -> Vec<(f64, f64)> {
        gauss_legendre_unit(self.u_order)
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, ascending.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("positive"));
    let mut out: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `S[j][l] = ∫_0^{s_j} ℓ_l(u) du` for the Lagrange basis on the nodes
/// `s_j`: exact for polynomials of degree below the node count.
pub fn integration_matrix(nodes: &[f64]) -> Vec<Vec<f64>> {
    let q = nodes.len();
    let inner = gauss_legendre_unit(q);
    let lagrange = |l: usize, x: f64| -> f64 {
        nodes
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != l)
            .map(|(_, &s)| (x - s) / (nodes[l] - s))
            .product()
    };
    nodes
        .iter()
        .map(|&s| {
            (0..q)
                .map(|l| inner.iter().map(|&(x, w)| s * w * lagrange(l, s * x)).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = gauss_legendre_unit(5);
        let v: f64 = r.iter().map(|&(x, w)| w * x.powi(9)).sum();
        assert!((v - 0.1).abs() < 1e-15);
        assert!(r.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn trapezoid_rule_shape() {
        let c = QuadratureConfig::default();
        let r = c.p_rule();
        assert_eq!(r.len(), 241);
        assert!((r[120].0).abs() < 1e-15);
        let total: f64 = r.iter().map(|p| p.1).sum();
        assert!((total - 24.0).abs() < 1e-12);
    }

    #[test]
    fn integration_matrix_is_exact_on_polynomials() {
        let nodes: Vec<f64> = gauss_legendre_unit(8).iter().map(|p| p.0).collect();
        let s = integration_matrix(&nodes);
        for (j, row) in s.iter().enumerate() {
            let approx: f64 = row.iter().zip(&nodes).map(|(w, x)| w * x.powi(4)).sum();
            assert!((approx - nodes[j].powi(5) / 5.0).abs() < 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(QuadratureConfig {
            u_order: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(QuadratureConfig {
            p_points: 240,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(QuadratureConfig::default().validate().is_ok());
    }
}
