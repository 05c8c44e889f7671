//! The verification suites. Each suite runs its checks on the configured
//! scenario (or on the fixed objects its operation is about) and ships at
//! least one negative control, a check built to fail.

mod calculus_suites;
mod exact;
mod expansion;
mod qsi_suites;
mod radius;

use std::time::Instant;

use fock_core::GridConfig;
use processes::{scenario, ScenarioName, ScenarioOutput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, SuiteId};
use crate::report::{CheckRecord, Rule, SuiteRecord, Tolerance, VerificationReport};
use crate::Result;

/// Grid and truncation of the Ito-correction ablation. The inflation
/// factor there is `1 + n·t/(J - b)`, so it needs many bins and few levels.
pub const ITO_CONTROL_BINS: usize = 16;
pub const ITO_CONTROL_LEVELS: usize = 2;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ScenarioConfig,
    pub scenario: ScenarioName,
    pub label: String,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Self {
        let scenario = cfg.effective_scenario();
        Self {
            cfg,
            label: scenario.label(),
            scenario,
        }
    }

    pub fn n(&self) -> usize {
        self.cfg.grid.n_bins
    }

    pub fn big_j(&self) -> usize {
        self.cfg.truncation.max_level
    }

    pub fn buffer(&self) -> usize {
        self.cfg.truncation.buffer
    }

    pub fn ladder(&self) -> &[usize] {
        &self.cfg.grid.ladder
    }

    pub fn build(&self, name: &ScenarioName, n: usize, big_j: usize) -> Result<ScenarioOutput> {
        Ok(scenario(name, GridConfig::new(n)?, big_j)?)
    }

    pub fn primary(&self, n: usize) -> Result<ScenarioOutput> {
        self.build(&self.scenario, n, self.big_j())
    }

    /// Seeded generator for harness-side random data, separate per suite.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        r.set_stream(stream);
        r
    }

    pub fn at_most(&self, limit: f64, source: &str) -> Tolerance {
        Tolerance::new(Rule::AtMost { limit }, source)
    }

    pub fn order_one(&self) -> Tolerance {
        let t = &self.cfg.tolerances;
        Tolerance::new(
            Rule::Order {
                min: t.order_min,
                max: Some(t.order_max),
                exact: t.exact,
            },
            "order",
        )
    }

    pub fn order_at_least(&self) -> Tolerance {
        let t = &self.cfg.tolerances;
        Tolerance::new(
            Rule::Order {
                min: t.order_min,
                max: None,
                exact: t.exact,
            },
            "order",
        )
    }
}

/// Run one suite on `cfg`. Errors carry the suite name.
pub fn run_suite(id: SuiteId, cfg: &ScenarioConfig) -> Result<SuiteRecord> {
    cfg.validate()?;
    let ctx = Ctx::new(cfg);
    let start = Instant::now();
    let checks: Result<Vec<CheckRecord>> = match id {
        SuiteId::BoundsAdjoints => exact::bounds_adjoints(&ctx),
        SuiteId::MatrixElements => exact::matrix_elements(&ctx),
        SuiteId::Adaptedness => exact::adaptedness(&ctx),
        SuiteId::ItoProduct => qsi_suites::ito_product(&ctx),
        SuiteId::Powers => qsi_suites::powers(&ctx),
        SuiteId::Duhamel => calculus_suites::duhamel(&ctx),
        SuiteId::SeriesVsQuadrature => calculus_suites::series_vs_quadrature(&ctx),
        SuiteId::FourierCalculus => calculus_suites::fourier_calculus(&ctx),
        SuiteId::ItoFunctional => calculus_suites::ito_functional(&ctx),
        SuiteId::BrownianClassical => calculus_suites::brownian_classical(&ctx),
        SuiteId::Perturbation => calculus_suites::perturbation(&ctx),
        SuiteId::DuhamelExpansion => expansion::duhamel_expansion(&ctx),
        SuiteId::Stratonovich => expansion::stratonovich(&ctx),
        SuiteId::AnalyticRadius => radius::analytic_radius(&ctx),
    };
    let checks = checks.map_err(|e| e.in_suite(id.as_str()))?;
    Ok(SuiteRecord::new(
        id,
        ctx.label.clone(),
        checks,
        start.elapsed().as_secs_f64(),
    ))
}

/// Run every suite listed in `cfg` in order.
pub fn run_config(cfg: &ScenarioConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = VerificationReport::new(cfg.clone());
    for &id in &cfg.suites {
        report.suites.push(run_suite(id, cfg)?);
    }
    Ok(report)
}
