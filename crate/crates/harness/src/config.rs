use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use calculus::QuadratureConfig;
use fock_core::binomial;
use processes::ScenarioName;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Largest total Fock dimension `C(n + J, J)` a configuration may request.
pub const MAX_TOTAL_DIM: usize = 3200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    BoundsAdjoints,
    MatrixElements,
    Adaptedness,
    ItoProduct,
    Powers,
    Duhamel,
    SeriesVsQuadrature,
    FourierCalculus,
    ItoFunctional,
    BrownianClassical,
    Perturbation,
    DuhamelExpansion,
    Stratonovich,
    AnalyticRadius,
}

impl SuiteId {
    pub const ALL: [SuiteId; 14] = [
        SuiteId::BoundsAdjoints,
        SuiteId::MatrixElements,
        SuiteId::Adaptedness,
        SuiteId::ItoProduct,
        SuiteId::Powers,
        SuiteId::Duhamel,
        SuiteId::SeriesVsQuadrature,
        SuiteId::FourierCalculus,
        SuiteId::ItoFunctional,
        SuiteId::BrownianClassical,
        SuiteId::Perturbation,
        SuiteId::DuhamelExpansion,
        SuiteId::Stratonovich,
        SuiteId::AnalyticRadius,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::BoundsAdjoints => "bounds-adjoints",
            SuiteId::MatrixElements => "matrix-elements",
            SuiteId::Adaptedness => "adaptedness",
            SuiteId::ItoProduct => "ito-product",
            SuiteId::Powers => "powers",
            SuiteId::Duhamel => "duhamel",
            SuiteId::SeriesVsQuadrature => "series-vs-quadrature",
            SuiteId::FourierCalculus => "fourier-calculus",
            SuiteId::ItoFunctional => "ito-functional",
            SuiteId::BrownianClassical => "brownian-classical",
            SuiteId::Perturbation => "perturbation",
            SuiteId::DuhamelExpansion => "duhamel-expansion",
            SuiteId::Stratonovich => "stratonovich",
            SuiteId::AnalyticRadius => "analytic-radius",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Grid used by the fixed-size checks.
    pub n_bins: usize,
    /// Grid sizes of the convergence ladder, increasing.
    pub ladder: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_bins: 4,
            ladder: vec![2, 4, 8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSpec {
    pub max_level: usize,
    pub buffer: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            max_level: 5,
            buffer: 2,
        }
    }
}

/// Tolerance overrides. Defaults follow the ladder: exact identities,
/// quadrature-limited agreements, norm bounds, and order-1 convergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub exact: f64,
    pub quadrature: f64,
    pub bound: f64,
    /// Slack on the Duhamel kernel bound `‖J‖ⁿ/n!`.
    pub kernel_bound: f64,
    pub scalar_reduction: f64,
    pub symmetrisation: f64,
    pub order_min: f64,
    pub order_max: f64,
    /// Adaptedness residuals at or above this fail; between `exact` and
    /// this they are inconclusive.
    pub adapted_fail: f64,
    /// Inflation an ablation must cause to count as detected.
    pub ablation_factor: f64,
    pub radius_min: f64,
    pub brownian_radius_min: f64,
    pub vacuum_characteristic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            quadrature: 1e-8,
            bound: 1e-10,
            kernel_bound: 1e-8,
            scalar_reduction: 1e-10,
            symmetrisation: 1e-9,
            order_min: 0.7,
            order_max: 1.5,
            adapted_fail: 1e-3,
            ablation_factor: 10.0,
            radius_min: 0.15,
            brownian_radius_min: 10.0,
            vacuum_characteristic: 5e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            _ => Err(HarnessError::Config(format!(
                "unknown format `{s}` (json, csv, both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Directory for `report.json` / `report.csv`; nothing is written when unset.
    pub dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub truncation: TruncationSpec,
    pub scenario: ScenarioName,
    /// Master seed: replaces every seed inside `scenario` and drives the
    /// harness's own random data.
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub suites: Vec<SuiteId>,
    pub tolerances: Tolerances,
    pub output: OutputSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            truncation: TruncationSpec::default(),
            scenario: ScenarioName::brownian(),
            seed: 7,
            quadrature: QuadratureConfig::default(),
            suites: vec![],
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|source| HarnessError::Json {
            context: "config".into(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The configured scenario with the master seed applied.
    pub fn effective_scenario(&self) -> ScenarioName {
        self.scenario.with_seed(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let big_j = self.truncation.max_level;
        if self.grid.n_bins == 0 {
            return bad("grid.n_bins must be positive".into());
        }
        if self.grid.ladder.len() < 3 {
            return bad("grid.ladder needs at least 3 grid sizes for an order fit".into());
        }
        if self.grid.ladder.windows(2).any(|w| w[0] >= w[1]) || self.grid.ladder[0] == 0 {
            return bad("grid.ladder must be positive and strictly increasing".into());
        }
        if big_j == 0 {
            return bad("truncation.max_level must be positive".into());
        }
        if self.truncation.buffer > big_j {
            return bad(format!(
                "buffer {} exceeds max_level {big_j}",
                self.truncation.buffer
            ));
        }
        let largest = self
            .grid
            .ladder
            .iter()
            .copied()
            .max()
            .unwrap_or(0)
            .max(self.grid.n_bins);
        match binomial(largest + big_j, big_j) {
            Some(d) if d <= MAX_TOTAL_DIM => {}
            _ => {
                return bad(format!(
                    "C({} + {big_j}, {big_j}) exceeds {MAX_TOTAL_DIM}",
                    largest
                ))
            }
        }
        self.quadrature
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let t = &self.tolerances;
        let all = [
            t.exact,
            t.quadrature,
            t.bound,
            t.kernel_bound,
            t.scalar_reduction,
            t.symmetrisation,
            t.adapted_fail,
            t.ablation_factor,
            t.radius_min,
            t.brownian_radius_min,
            t.vacuum_characteristic,
            t.order_min,
            t.order_max,
        ];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) || t.order_min > t.order_max {
            return bad("tolerances must be finite and non-negative, order_min ≤ order_max".into());
        }
        if t.exact >= t.adapted_fail {
            return bad("tolerances.exact must lie below tolerances.adapted_fail".into());
        }
        Ok(())
    }
}
