//! Verification harness: scenario configuration, the suites that check
//! the quantum stochastic calculus at desk scale, report persistence and
//! the `cmx-verify` command line.

pub mod cli;
mod config;
mod error;
mod report;
mod suites;

pub use config::{
    Format, GridSpec, OutputSpec, ScenarioConfig, SuiteId, Tolerances, TruncationSpec,
    MAX_TOTAL_DIM,
};
pub use error::HarnessError;
pub use report::{
    emit_report, merge_reports, CheckRecord, Convergence, ConvergenceRow, Expect, Rule, Run,
    Status, SuiteRecord, Tolerance, VerificationReport,
};
pub use suites::{run_config, run_suite, ITO_CONTROL_BINS, ITO_CONTROL_LEVELS};

pub type Result<T> = std::result::Result<T, HarnessError>;
