use std::f64::consts::PI;

use fock_core::GridConfig;
use serde::{Deserialize, Serialize};

use crate::{
    basic_process, identity_process, kernel_process, polynomial_process, polynomial_quadruple,
    scalar_process, BasicKind, CmxProcess, KernelSpec, PolyExpr, ProcessError, Quadruple, Result,
    C64,
};

/// Maximal word length accepted by the polynomial scenario.
pub const POLY_DEPTH: usize = 4;

/// Phase function of the rotated scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Theta {
    /// `θ(t) = ω t + φ`
    Linear { omega: f64, phase: f64 },
    /// `θ(t) = a sin(2π ν t + φ)`
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
}

impl Default for Theta {
    fn default() -> Self {
        Theta::Linear {
            omega: 1.0,
            phase: 0.0,
        }
    }
}

impl Theta {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Theta::Linear { omega, phase } => omega * t + phase,
            Theta::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin(),
        }
    }

    /// `θ′(t)`, exact.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Theta::Linear { omega, .. } => omega,
            Theta::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * 2.0 * PI * frequency * (2.0 * PI * frequency * t + phase).cos(),
        }
    }
}

/// Seeded band-`k` kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    pub band: usize,
    pub xi: f64,
    pub seed: u64,
}

impl KernelParams {
    fn spec(&self, offset: u64) -> KernelSpec {
        KernelSpec::seeded(self.band, self.xi, self.seed.wrapping_add(offset))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", deny_unknown_fields)]
pub enum ScenarioName {
    /// `M = A + A†` with quadruple `(0, I, I, 0)`. Braces keep unknown
    /// config keys rejected.
    Brownian {},
    /// `P_t = e^{iθ}A_t + e^{-iθ}A_t†` with quadruple
    /// `(0, e^{iθ}, e^{-iθ}, θ′Q)` and `Q_t = i(e^{iθ}A_t - e^{-iθ}A_t†)`.
    Rotated {
        #[serde(default)]
        theta: Theta,
    },
    /// Kernel-defined quadruple `(E, F, F*, H)` with band-`k` kernel
    /// processes, `E = 0` unless `gauge`.
    KernelBand {
        band: usize,
        xi: f64,
        seed: u64,
        #[serde(default)]
        gauge: bool,
    },
    /// Polynomial in the basic processes, quadruple from the Ito product rule.
    Polynomial { expr: PolyExpr },
    /// Base quadruple plus `(0, S, S*, U)` built from kernel processes.
    Perturbed {
        base: Box<ScenarioName>,
        perturbation: KernelParams,
    },
}

impl ScenarioName {
    pub fn brownian() -> Self {
        ScenarioName::Brownian {}
    }

    pub fn kernel_band(band: usize, xi: f64, seed: u64) -> Self {
        ScenarioName::KernelBand {
            band,
            xi,
            seed,
            gauge: false,
        }
    }

    /// `Λ_t` alone: quadruple `(I, 0, 0, 0)`.
    pub fn gauge_only() -> Self {
        ScenarioName::Polynomial {
            expr: PolyExpr::word("L"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScenarioName::Brownian {} => "brownian".into(),
            ScenarioName::Rotated { .. } => "rotated".into(),
            ScenarioName::KernelBand { band, gauge, .. } => {
                format!("kernel_band({band}{})", if *gauge { ",gauge" } else { "" })
            }
            ScenarioName::Polynomial { expr } => format!("polynomial({expr})"),
            ScenarioName::Perturbed { base, .. } => format!("perturbed({})", base.label()),
        }
    }

    /// Seeds this scenario depends on, outermost first.
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            ScenarioName::KernelBand { seed, .. } => vec![*seed],
            ScenarioName::Perturbed { base, perturbation } => {
                let mut s = vec![perturbation.seed];
                s.extend(base.seeds());
                s
            }
            _ => vec![],
        }
    }

    /// Replace every seed by `seed` (perturbations get `seed + 1`).
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            ScenarioName::KernelBand {
                band, xi, gauge, ..
            } => ScenarioName::KernelBand {
                band: *band,
                xi: *xi,
                seed,
                gauge: *gauge,
            },
            ScenarioName::Perturbed { base, perturbation } => ScenarioName::Perturbed {
                base: Box::new(base.with_seed(seed)),
                perturbation: KernelParams {
                    seed: seed.wrapping_add(1),
                    ..*perturbation
                },
            },
            other => other.clone(),
        }
    }
}

/// Names and one-line descriptions of the built-in scenarios.
pub fn catalog() -> Vec<(ScenarioName, &'static str)> {
    vec![
        (
            ScenarioName::Brownian {},
            "quantum Brownian motion A + A†, quadruple (0, I, I, 0)",
        ),
        (
            ScenarioName::Rotated {
                theta: Theta::default(),
            },
            "rotated Brownian motion with θ(t) = t",
        ),
        (
            ScenarioName::kernel_band(1, 1.0, 7),
            "seeded band-1 kernel quadruple, no gauge part",
        ),
        (
            ScenarioName::KernelBand {
                band: 1,
                xi: 1.0,
                seed: 7,
                gauge: true,
            },
            "seeded band-1 kernel quadruple with gauge integrand",
        ),
        (
            ScenarioName::gauge_only(),
            "gauge process Λ, quadruple (I, 0, 0, 0)",
        ),
        (
            ScenarioName::Polynomial {
                expr: "AA + CC".parse().expect("static expression"),
            },
            "A_t² + A_t†², quadruple (0, 2A, 2A†, 0)",
        ),
        (
            ScenarioName::Perturbed {
                base: Box::new(ScenarioName::Brownian {}),
                perturbation: KernelParams {
                    band: 1,
                    xi: 0.5,
                    seed: 11,
                },
            },
            "Brownian motion plus a band-1 kernel perturbation",
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub quadruple: Quadruple,
    /// Unperturbed quadruple for `perturbed`.
    pub base: Option<Quadruple>,
    /// The process the quadruple integrates to, when known in closed form.
    pub reference: Option<CmxProcess>,
}

pub fn scenario(name: &ScenarioName, grid: GridConfig, max_level: usize) -> Result<ScenarioOutput> {
    let zero = || CmxProcess::zero(grid, max_level);
    match name {
        ScenarioName::Brownian {} => {
            let id = identity_process(grid, max_level)?;
            let q = Quadruple::new(zero()?, id.clone(), id, zero()?, true)?;
            let a = basic_process(grid, max_level, BasicKind::Annihilation)?;
            let reference = a.add(&a.adjoint()?)?;
            Ok(ScenarioOutput {
                quadruple: q,
                base: None,
                reference: Some(reference),
            })
        }
        ScenarioName::Rotated { theta } => {
            let th = *theta;
            let phase = move |t: f64| C64::from_polar(1.0, th.value(t));
            let a = basic_process(grid, max_level, BasicKind::Annihilation)?;
            let c = basic_process(grid, max_level, BasicKind::Creation)?;
            let ea = a.scale_by(phase)?;
            let ec = c.scale_by(move |t| phase(t).conj())?;
            let p = ea.add(&ec)?;
            let qproc = ea.sub(&ec)?.scale(C64::new(0.0, 1.0))?;
            let h = qproc.scale_by(move |t| C64::new(th.derivative(t), 0.0))?;
            let f = scalar_process(grid, max_level, phase)?;
            let g = scalar_process(grid, max_level, move |t| phase(t).conj())?;
            let q = Quadruple::new(zero()?, f, g, h, true)?;
            Ok(ScenarioOutput {
                quadruple: q,
                base: None,
                reference: Some(p),
            })
        }
        ScenarioName::KernelBand {
            band,
            xi,
            seed,
            gauge,
        } => {
            let params = KernelParams {
                band: *band,
                xi: *xi,
                seed: *seed,
            };
            let e = if *gauge {
                kernel_process(&params.spec(0), grid, max_level)?
            } else {
                zero()?
            };
            let f = kernel_process(&params.spec(1), grid, max_level)?
                .scale(C64::from_polar(1.0, PI / 3.0))?;
            let g = f.adjoint()?;
            let h = kernel_process(&params.spec(2), grid, max_level)?;
            let q = Quadruple::new(e, f, g, h, true)?;
            Ok(ScenarioOutput {
                quadruple: q,
                base: None,
                reference: None,
            })
        }
        ScenarioName::Polynomial { expr } => {
            let q = polynomial_quadruple(expr, grid, max_level, POLY_DEPTH)?;
            let reference = polynomial_process(expr, grid, max_level, POLY_DEPTH)?;
            Ok(ScenarioOutput {
                quadruple: q,
                base: None,
                reference: Some(reference),
            })
        }
        ScenarioName::Perturbed { base, perturbation } => {
            if matches!(**base, ScenarioName::Perturbed { .. }) {
                return Err(ProcessError::UnknownScenario("nested perturbation".into()));
            }
            let b = scenario(base, grid, max_level)?.quadruple;
            let s = kernel_process(&perturbation.spec(0), grid, max_level)?
                .scale(C64::from_polar(1.0, PI / 3.0))?;
            let u = kernel_process(&perturbation.spec(1), grid, max_level)?;
            let delta = Quadruple::new(zero()?, s.clone(), s.adjoint()?, u, true)?;
            Ok(ScenarioOutput {
                quadruple: b.add(&delta)?,
                base: Some(b),
                reference: None,
            })
        }
    }
}
