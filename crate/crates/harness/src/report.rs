use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{Format, ScenarioConfig, SuiteId};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome a check is designed to have. Negative controls expect `Fail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum Rule {
    AtMost {
        limit: f64,
    },
    AtLeast {
        limit: f64,
    },
    /// Pass at or below `pass_at_most`, fail at or above `fail_at_least`,
    /// inconclusive in between.
    Band {
        pass_at_most: f64,
        fail_at_least: f64,
    },
    /// Fitted order within `[min, max]` (`max` absent: no upper limit).
    /// Residuals all at or below `exact` count as an exact identity.
    Order {
        min: f64,
        max: Option<f64>,
        exact: f64,
    },
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Rule::AtMost { limit } => write!(f, "≤ {limit:e}"),
            Rule::AtLeast { limit } => write!(f, "≥ {limit}"),
            Rule::Band {
                pass_at_most,
                fail_at_least,
            } => write!(f, "≤ {pass_at_most:e} (fail ≥ {fail_at_least:e})"),
            Rule::Order {
                min,
                max: Some(max),
                ..
            } => write!(f, "order in [{min}, {max}]"),
            Rule::Order { min, max: None, .. } => write!(f, "order ≥ {min}"),
        }
    }
}

impl Rule {
    fn judge(self, value: f64) -> Status {
        let pass = |ok: bool| if ok { Status::Pass } else { Status::Fail };
        if !value.is_finite() && !matches!(self, Rule::AtLeast { .. }) {
            return Status::Inconclusive;
        }
        match self {
            Rule::AtMost { limit } => pass(value <= limit),
            Rule::AtLeast { limit } => pass(value >= limit),
            Rule::Band {
                pass_at_most,
                fail_at_least,
            } => {
                if value <= pass_at_most {
                    Status::Pass
                } else if value >= fail_at_least {
                    Status::Fail
                } else {
                    Status::Inconclusive
                }
            }
            Rule::Order { min, max, .. } => pass(value >= min && max.is_none_or(|m| value <= m)),
        }
    }
}

/// A rule together with the name of the tolerance it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rule: Rule,
    pub source: String,
}

impl Tolerance {
    pub fn new(rule: Rule, source: &str) -> Self {
        Self {
            rule,
            source: source.to_string(),
        }
    }
}

/// Residuals of one configuration at each grid time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub n_bins: usize,
    pub max_level: usize,
    /// Highest level the residual is measured on.
    pub checked_level: Option<usize>,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

impl Run {
    pub fn new(
        n_bins: usize,
        max_level: usize,
        checked_level: Option<usize>,
        residuals: Vec<f64>,
    ) -> Self {
        let times = if residuals.len() == n_bins + 1 {
            (0..=n_bins).map(|k| k as f64 / n_bins as f64).collect()
        } else {
            vec![1.0; residuals.len()]
        };
        Self::with_times(n_bins, max_level, checked_level, times, residuals)
    }

    pub fn with_times(
        n_bins: usize,
        max_level: usize,
        checked_level: Option<usize>,
        times: Vec<f64>,
        residuals: Vec<f64>,
    ) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        Self {
            n_bins,
            max_level,
            checked_level,
            times,
            residuals,
            max_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_bins: usize,
    pub dt: f64,
    pub residual: f64,
}

/// Residual against grid size with the least-squares order in `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub rows: Vec<ConvergenceRow>,
    pub order: Option<f64>,
}

impl Convergence {
    pub fn from_runs(runs: &[Run]) -> Self {
        let rows: Vec<ConvergenceRow> = runs
            .iter()
            .map(|r| ConvergenceRow {
                n_bins: r.n_bins,
                dt: 1.0 / r.n_bins as f64,
                residual: r.max_residual,
            })
            .collect();
        let order = if rows.len() >= 3 {
            calculus::log_slope(&rows.iter().map(|r| (r.dt, r.residual)).collect::<Vec<_>>())
        } else {
            None
        };
        Self { rows, order }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub scenario: String,
    pub expect: Expect,
    pub status: Status,
    pub tolerance: Tolerance,
    /// The quantity compared with the tolerance (the fitted order for
    /// convergence checks).
    pub value: Option<f64>,
    pub runs: Vec<Run>,
    pub convergence: Option<Convergence>,
    pub note: Option<String>,
}

impl CheckRecord {
    /// A check on a single measured value.
    pub fn value(
        name: &str,
        scenario: &str,
        tolerance: Tolerance,
        value: f64,
        runs: Vec<Run>,
    ) -> Self {
        let status = tolerance.rule.judge(value);
        Self {
            name: name.to_string(),
            scenario: scenario.to_string(),
            expect: Expect::Pass,
            status,
            tolerance,
            value: value.is_finite().then_some(value),
            runs,
            convergence: None,
            note: None,
        }
    }

    /// A convergence check over a ladder of runs; `tolerance.rule` must be
    /// [`Rule::Order`].
    pub fn order(name: &str, scenario: &str, tolerance: Tolerance, runs: Vec<Run>) -> Self {
        let conv = Convergence::from_runs(&runs);
        let exact = match tolerance.rule {
            Rule::Order { exact, .. } => exact,
            _ => 0.0,
        };
        let (status, note) = if runs.len() >= 3 && runs.iter().all(|r| r.max_residual <= exact) {
            (
                Status::Pass,
                Some(format!(
                    "residual ≤ {exact:e} at every grid size: exact identity"
                )),
            )
        } else {
            match conv.order {
                Some(o) => (tolerance.rule.judge(o), None),
                None => (
                    Status::Inconclusive,
                    Some("order undefined (fewer than 3 positive residuals)".into()),
                ),
            }
        };
        Self {
            name: name.to_string(),
            scenario: scenario.to_string(),
            expect: Expect::Pass,
            status,
            value: conv.order,
            tolerance,
            runs,
            convergence: Some(conv),
            note,
        }
    }

    /// Mark as a negative control.
    pub fn control(mut self) -> Self {
        self.expect = Expect::Fail;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }

    /// Whether the outcome matches the design: a pass for checks, a fail
    /// for negative controls.
    pub fn as_expected(&self) -> bool {
        matches!(
            (self.expect, self.status),
            (Expect::Pass, Status::Pass) | (Expect::Fail, Status::Fail)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub suite: SuiteId,
    pub scenario: String,
    /// `pass` when every check met its expectation.
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub wall_time_s: f64,
}

impl SuiteRecord {
    pub fn new(
        suite: SuiteId,
        scenario: String,
        checks: Vec<CheckRecord>,
        wall_time_s: f64,
    ) -> Self {
        let status = if checks
            .iter()
            .any(|c| c.status != Status::Inconclusive && !c.as_expected())
        {
            Status::Fail
        } else if checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        Self {
            suite,
            scenario,
            status,
            checks,
            wall_time_s,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub suites: Vec<SuiteRecord>,
}

impl VerificationReport {
    pub fn new(config: ScenarioConfig) -> Self {
        Self {
            seed: config.seed,
            config,
            suites: vec![],
        }
    }

    /// Worst suite status: any fail, else any inconclusive, else pass.
    /// An empty report passes.
    pub fn status(&self) -> Status {
        let s: Vec<Status> = self.suites.iter().map(|s| s.status).collect();
        if s.contains(&Status::Fail) {
            Status::Fail
        } else if s.contains(&Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn suite(&self, id: SuiteId) -> Option<&SuiteRecord> {
        self.suites.iter().find(|s| s.suite == id)
    }

    /// Copy with every timing field zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.suites.iter_mut().for_each(|s| s.wall_time_s = 0.0);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| HarnessError::Json {
            context: "report".into(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// One row per grid time of every run: `suite,check,n_bins,J,t,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,n_bins,J,t,residual\n");
        for s in &self.suites {
            for c in &s.checks {
                for r in &c.runs {
                    for (t, v) in r.times.iter().zip(&r.residuals) {
                        writeln!(
                            out,
                            "{},{},{},{},{t:e},{v:e}",
                            s.suite, c.name, r.n_bins, r.max_level
                        )
                        .expect("write to string");
                    }
                }
            }
        }
        out
    }
}

/// Write `report.json` and/or `report.csv` into `dir`, returning the paths.
pub fn emit_report(
    report: &VerificationReport,
    dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>> {
    let io = |path: &Path| {
        let p = path.display().to_string();
        move |source| HarnessError::Io { path: p, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = vec![];
    if format.json() {
        let path = dir.join("report.json");
        std::fs::write(&path, report.to_json() + "\n").map_err(io(&path))?;
        written.push(path);
    }
    if format.csv() {
        let path = dir.join("report.csv");
        std::fs::write(&path, report.to_csv()).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Combine reports of the same configuration. Suites are concatenated in
/// order; a suite present in several inputs keeps its last record.
pub fn merge_reports(reports: &[VerificationReport]) -> Result<VerificationReport> {
    let first = reports
        .first()
        .ok_or_else(|| HarnessError::Config("nothing to merge".into()))?;
    let strip = |c: &ScenarioConfig| ScenarioConfig {
        suites: vec![],
        output: Default::default(),
        ..c.clone()
    };
    let mut out = VerificationReport::new(strip(&first.config));
    for r in reports {
        if strip(&r.config) != out.config || r.seed != out.seed {
            return Err(HarnessError::Config(
                "reports come from different configurations".into(),
            ));
        }
        for s in &r.suites {
            out.suites.retain(|x| x.suite != s.suite);
            out.suites.push(s.clone());
        }
    }
    out.config.suites = out.suites.iter().map(|s| s.suite).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> VerificationReport {
        let runs: Vec<Run> = [2usize, 4, 8]
            .iter()
            .map(|&n| {
                Run::new(
                    n,
                    4,
                    Some(2),
                    (0..=n).map(|k| 0.3 * k as f64 / (n * n) as f64).collect(),
                )
            })
            .collect();
        let order = CheckRecord::order(
            "order",
            "brownian",
            Tolerance::new(
                Rule::Order {
                    min: 0.7,
                    max: Some(1.5),
                    exact: 1e-12,
                },
                "order",
            ),
            runs,
        );
        let spot = CheckRecord::value(
            "spot",
            "brownian",
            Tolerance::new(Rule::AtMost { limit: 1e-12 }, "exact"),
            0.1,
            vec![],
        )
        .control();
        let mut r = VerificationReport::new(ScenarioConfig::default());
        r.suites.push(SuiteRecord::new(
            SuiteId::Powers,
            "brownian".into(),
            vec![order, spot],
            1.25,
        ));
        r
    }

    #[test]
    fn rules_judge_values() {
        assert_eq!(Rule::AtMost { limit: 1.0 }.judge(1.0), Status::Pass);
        assert_eq!(Rule::AtLeast { limit: 1.0 }.judge(0.5), Status::Fail);
        assert_eq!(
            Rule::AtLeast { limit: 1.0 }.judge(f64::INFINITY),
            Status::Pass
        );
        let band = Rule::Band {
            pass_at_most: 1e-12,
            fail_at_least: 1e-3,
        };
        assert_eq!(band.judge(1e-6), Status::Inconclusive);
        assert_eq!(band.judge(1e-2), Status::Fail);
        assert_eq!(
            Rule::Order {
                min: 0.7,
                max: None,
                exact: 0.0
            }
            .judge(3.0),
            Status::Pass
        );
        assert_eq!(
            Rule::AtMost { limit: 1.0 }.judge(f64::NAN),
            Status::Inconclusive
        );
    }

    #[test]
    fn order_checks_fit_slopes() {
        let r = sample_report();
        let c = r.suites[0].check("order").unwrap();
        assert!((c.value.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(c.status, Status::Pass);
        // The control fails as designed, so the suite passes.
        assert_eq!(r.suites[0].status, Status::Pass);
        assert_eq!(r.status(), Status::Pass);
    }

    #[test]
    fn exact_ladders_pass_without_a_slope() {
        let runs = [2usize, 4, 8]
            .iter()
            .map(|&n| Run::new(n, 3, None, vec![0.0; n + 1]))
            .collect();
        let c = CheckRecord::order(
            "x",
            "s",
            Tolerance::new(
                Rule::Order {
                    min: 0.7,
                    max: None,
                    exact: 1e-12,
                },
                "order",
            ),
            runs,
        );
        assert_eq!(c.status, Status::Pass);
        assert!(c.value.is_none() && c.note.is_some());
    }

    #[test]
    fn json_round_trip_and_csv_rows() {
        let r = sample_report();
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + 3 + 5 + 9);
        assert!(r.to_json().contains("\"seed\": 7"));
    }

    #[test]
    fn emit_writes_requested_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample_report();
        let paths = emit_report(&r, dir.path(), Format::Both).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(VerificationReport::load(&paths[0]).unwrap(), r);
        assert_eq!(emit_report(&r, dir.path(), Format::Csv).unwrap().len(), 1);
    }

    #[test]
    fn merge_requires_matching_configs() {
        let a = sample_report();
        let mut b = sample_report();
        b.suites[0].suite = SuiteId::Duhamel;
        let m = merge_reports(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(m.config.suites, vec![SuiteId::Powers, SuiteId::Duhamel]);
        let mut c = b;
        c.seed = 99;
        c.config.seed = 99;
        assert!(merge_reports(&[a, c]).is_err());
        assert!(merge_reports(&[]).is_err());
    }
}
