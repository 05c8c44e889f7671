use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::{gauss_legendre_unit, QuadratureConfig};
use crate::{CalculusError, Result, C64};

/// Tolerance on the neglected Fourier tail `∫_{|p|>p_max} (1+p²)|f̂|`.
pub const TAIL_TOL: f64 = 1e-10;

/// Scalar functions with closed-form derivatives and, except for
/// polynomials, Fourier transforms in the convention
/// `f(x) = ∫ f̂(p) e^{ipx} dp`, `f̂(p) = (2π)^{-1} ∫ f(x) e^{-ipx} dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `e^{-x²/2σ²}`
    Gaussian { sigma: f64 },
    /// `H_n(x/σ) e^{-x²/2σ²}` with physicists' Hermite polynomials.
    HermiteGaussian { n: usize, sigma: f64 },
    /// `Σ_k c_k x^k`
    Polynomial { coeffs: Vec<f64> },
}

/// `H_0 … H_{n}` at `y`.
fn hermite_all(n: usize, y: f64) -> Vec<f64> {
    let mut h = vec![1.0, 2.0 * y];
    for k in 1..n {
        let next = 2.0 * y * h[k] - 2.0 * k as f64 * h[k - 1];
        h.push(next);
    }
    h.truncate(n + 1);
    h
}

impl FunctionSpec {
    pub fn gaussian(sigma: f64) -> Self {
        FunctionSpec::Gaussian { sigma }
    }

    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Gaussian { sigma } => format!("gaussian({sigma})"),
            FunctionSpec::HermiteGaussian { n, sigma } => format!("hermite_gaussian({n},{sigma})"),
            FunctionSpec::Polynomial { coeffs } => format!("polynomial{coeffs:?}"),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, FunctionSpec::Polynomial { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Gaussian { sigma } | FunctionSpec::HermiteGaussian { sigma, .. }
                if sigma.is_nan() || *sigma <= 0.0 =>
            {
                Err(CalculusError::Config("σ must be positive".into()))
            }
            FunctionSpec::Polynomial { coeffs } if coeffs.is_empty() => Err(CalculusError::Config(
                "polynomial needs coefficients".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `f^{(k)}(x)` for `k ≤ 2`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        match self {
            FunctionSpec::Gaussian { sigma } => FunctionSpec::HermiteGaussian {
                n: 0,
                sigma: *sigma,
            }
            .derivative(k, x),
            FunctionSpec::HermiteGaussian { n, sigma } => {
                let y = x / sigma;
                let g = (-0.5 * y * y).exp();
                let h = hermite_all(*n, y);
                let hm = |j: usize| if j <= *n { h[*n - j] } else { 0.0 };
                let nf = *n as f64;
                let v = match k {
                    0 => hm(0),
                    1 => 2.0 * nf * hm(1) - y * hm(0),
                    2 => {
                        4.0 * nf * (nf - 1.0) * hm(2) - 4.0 * nf * y * hm(1) + (y * y - 1.0) * hm(0)
                    }
                    _ => panic!("derivative order {k} not available"),
                };
                v * g / sigma.powi(k as i32)
            }
            FunctionSpec::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(k)
                .map(|(j, c)| {
                    c * ((j + 1 - k)..=j).map(|r| r as f64).product::<f64>()
                        * x.powi((j - k) as i32)
                })
                .sum(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `f̂(p)`; `None` for polynomials.
    pub fn fourier(&self, p: f64) -> Option<C64> {
        match self {
            FunctionSpec::Gaussian { sigma } => Some(C64::new(
                sigma / (2.0 * PI).sqrt() * (-0.5 * (sigma * p).powi(2)).exp(),
                0.0,
            )),
            FunctionSpec::HermiteGaussian { n, sigma } => {
                let q = sigma * p;
                let h = hermite_all(*n, q)[*n];
                let phase = C64::new(0.0, -1.0).powu(*n as u32);
                Some(phase * (sigma / (2.0 * PI).sqrt() * h * (-0.5 * q * q).exp()))
            }
            FunctionSpec::Polynomial { .. } => None,
        }
    }

    /// `∫_{|p| > p_max} (1 + p²) |f̂(p)| dp`, by Gauss–Legendre on a long
    /// enough outer interval.
    pub fn fourier_tail(&self, p_max: f64) -> Option<f64> {
        let sigma = match self {
            FunctionSpec::Gaussian { sigma } | FunctionSpec::HermiteGaussian { sigma, .. } => {
                *sigma
            }
            FunctionSpec::Polynomial { .. } => return None,
        };
        let span = 40.0 / sigma;
        let rule = gauss_legendre_unit(64);
        let mut total = 0.0;
        for piece in 0..8 {
            let a = p_max + span * piece as f64 / 8.0;
            let len = span / 8.0;
            for &(x, w) in &rule {
                let p = a + len * x;
                let g = |p: f64| (1.0 + p * p) * self.fourier(p).map_or(0.0, |c| c.norm());
                total += len * w * (g(p) + g(-p));
            }
        }
        Some(total)
    }

    /// Trapezoid approximations of `f`, `f′`, `f″` at `x` from the Fourier
    /// representation.
    pub fn fourier_derivatives(&self, rule: &[(f64, f64)], x: f64) -> [C64; 3] {
        let mut out = [C64::new(0.0, 0.0); 3];
        for &(p, w) in rule {
            let c = w * self.fourier(p).expect("non-polynomial") * C64::from_polar(1.0, p * x);
            let ip = C64::new(0.0, p);
            out[0] += c;
            out[1] += c * ip;
            out[2] += c * ip * ip;
        }
        out
    }

    /// Check the function can be used through its Fourier transform.
    pub fn check_fourier(&self, quad: &QuadratureConfig) -> Result<()> {
        quad.validate()?;
        match self.fourier_tail(quad.p_max) {
            None => Err(CalculusError::Config(format!(
                "{} has no Fourier representation",
                self.label()
            ))),
            Some(t) if t > TAIL_TOL => Err(CalculusError::Config(format!(
                "Fourier tail {t:e} beyond p_max = {} exceeds {TAIL_TOL:e}",
                quad.p_max
            ))),
            Some(_) => Ok(()),
        }
    }
}

/// Scalar function data used by the matrix kernels: either exact closed
/// forms or their Fourier quadratures.
#[derive(Debug, Clone)]
pub enum Evaluator<'a> {
    Exact(&'a FunctionSpec),
    Fourier(&'a FunctionSpec, Vec<(f64, f64)>),
}

impl<'a> Evaluator<'a> {
    pub fn exact(f: &'a FunctionSpec) -> Self {
        Evaluator::Exact(f)
    }

    pub fn fourier(f: &'a FunctionSpec, quad: &QuadratureConfig) -> Result<Self> {
        f.check_fourier(quad)?;
        Ok(Evaluator::Fourier(f, quad.p_rule()))
    }

    /// `[F, F′, F″]` at `x`.
    pub fn eval(&self, x: f64) -> [C64; 3] {
        match self {
            Evaluator::Exact(f) => [0, 1, 2].map(|k| C64::new(f.derivative(k, x), 0.0)),
            Evaluator::Fourier(f, rule) => f.fourier_derivatives(rule, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: &FunctionSpec, k: usize, x: f64) -> f64 {
        let h = 1e-5;
        (f.derivative(k - 1, x + h) - f.derivative(k - 1, x - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_differences() {
        let specs = [
            FunctionSpec::gaussian(1.0),
            FunctionSpec::gaussian(0.7),
            FunctionSpec::HermiteGaussian { n: 3, sigma: 1.2 },
            FunctionSpec::Polynomial {
                coeffs: vec![1.0, -2.0, 0.5, 0.25],
            },
        ];
        for f in &specs {
            for x in [-1.3, 0.0, 0.4, 2.1] {
                for k in 1..=2 {
                    assert!(
                        (fd(f, k, x) - f.derivative(k, x)).abs() < 1e-8,
                        "{} k={k} x={x}",
                        f.label()
                    );
                }
            }
        }
    }

    #[test]
    fn scalar_gaussian_values() {
        let f = FunctionSpec::gaussian(1.0);
        assert_eq!(f.value(0.0), 1.0);
        let rule = QuadratureConfig::default().p_rule();
        let v = f.fourier_derivatives(&rule, 0.5)[0];
        assert!((v.re - (-0.125f64).exp()).abs() < 1e-10 && v.im.abs() < 1e-14);
        // f′(0.3)·2 for the scalar differential.
        assert!((2.0 * f.derivative(1, 0.3) + 0.3 * (-0.045f64).exp() * 2.0).abs() < 1e-15);
    }

    #[test]
    fn fourier_inverts_for_hermite_gaussians() {
        let rule = QuadratureConfig::default().p_rule();
        for n in 0..4 {
            let f = FunctionSpec::HermiteGaussian { n, sigma: 1.0 };
            for x in [-1.0, 0.2, 1.7] {
                let d = f.fourier_derivatives(&rule, x);
                for (k, dk) in d.iter().enumerate().take(3) {
                    assert!(
                        (dk.re - f.derivative(k, x)).abs() < 1e-9,
                        "n={n} k={k} x={x}"
                    );
                    assert!(dk.im.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn tail_check() {
        let q = QuadratureConfig::default();
        assert!(FunctionSpec::gaussian(1.0).check_fourier(&q).is_ok());
        assert!(FunctionSpec::gaussian(0.2).check_fourier(&q).is_err());
        assert!(FunctionSpec::Polynomial {
            coeffs: vec![0.0, 1.0]
        }
        .check_fourier(&q)
        .is_err());
    }

    #[test]
    fn config_round_trip() {
        let f = FunctionSpec::HermiteGaussian { n: 2, sigma: 1.5 };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FunctionSpec>(&s).unwrap(), f);
        assert!(
            serde_json::from_str::<FunctionSpec>(r#"{"name":"gaussian","sigma":1,"x":2}"#).is_err()
        );
    }
}
