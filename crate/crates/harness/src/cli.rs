//! `cmx-verify`: run suites, list scenarios, merge reports.
//!
//! Exit codes: 0 when every suite passes, 1 when any fails or is
//! inconclusive, 2 on errors (including usage errors).

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use processes::catalog;

use crate::config::{Format, ScenarioConfig, SuiteId};
use crate::report::{emit_report, merge_reports, Status, SuiteRecord, VerificationReport};
use crate::{run_suite, HarnessError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "cmx-verify",
    version,
    about = "Desk-scale verification of the quantum stochastic calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one suite, `all`, or (with no argument) the suites listed in the config.
    Verify {
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        buffer: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Built-in scenarios.
    Scenarios {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Report files.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Debug, Subcommand)]
enum ScenarioAction {
    /// Print every scenario with its config form.
    List,
}

#[derive(Debug, Subcommand)]
enum ReportAction {
    /// Merge JSON reports of one configuration.
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
}

struct Painter {
    color: bool,
}

impl Painter {
    fn from_env() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    fn status(&self, s: Status) -> String {
        let (text, code) = match s {
            Status::Pass => ("PASS", "32"),
            Status::Fail => ("FAIL", "31"),
            Status::Inconclusive => ("INCONCLUSIVE", "33"),
        };
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn print_suite(out: &mut impl Write, p: &Painter, s: &SuiteRecord) -> std::io::Result<()> {
    writeln!(
        out,
        "{} {} [{}] {:.1}s",
        p.status(s.status),
        s.suite,
        s.scenario,
        s.wall_time_s
    )?;
    for c in &s.checks {
        let mark = if c.as_expected() { "ok  " } else { "BAD " };
        let value = c.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
        let control = if c.expect == crate::Expect::Fail {
            " (control, expected fail)"
        } else {
            ""
        };
        writeln!(
            out,
            "  {mark}{:<40} {:<12} {} {}{control}",
            c.name,
            c.status.as_str(),
            value,
            c.tolerance.rule
        )?;
    }
    Ok(())
}

fn parse_format(f: Option<String>) -> Result<Option<Format>> {
    f.map(|s| s.parse()).transpose()
}

fn verify(
    suite: Option<String>,
    config: Option<PathBuf>,
    overrides: (Option<usize>, Option<usize>, Option<usize>, Option<u64>),
    out_dir: Option<PathBuf>,
    format: Option<String>,
    out: &mut impl Write,
) -> Result<Status> {
    let mut cfg = match config {
        Some(path) => ScenarioConfig::load(&path)?,
        None => ScenarioConfig::default(),
    };
    let (bins, levels, buffer, seed) = overrides;
    if let Some(n) = bins {
        cfg.grid.n_bins = n;
    }
    if let Some(j) = levels {
        cfg.truncation.max_level = j;
    }
    if let Some(b) = buffer {
        cfg.truncation.buffer = b;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(d) = out_dir {
        cfg.output.dir = Some(d);
    }
    if let Some(f) = parse_format(format)? {
        cfg.output.format = f;
    }
    match suite.as_deref() {
        Some("all") => cfg.suites = SuiteId::ALL.to_vec(),
        Some(s) => cfg.suites = vec![s.parse()?],
        None => {}
    }
    cfg.validate()?;
    let painter = Painter::from_env();
    let mut report = VerificationReport::new(cfg.clone());
    let io = |e: std::io::Error| HarnessError::Io {
        path: "stdout".into(),
        source: e,
    };
    for &id in &cfg.suites {
        let rec = run_suite(id, &cfg)?;
        print_suite(out, &painter, &rec).map_err(io)?;
        report.suites.push(rec);
    }
    let status = report.status();
    writeln!(
        out,
        "{} {} suite(s)",
        painter.status(status),
        report.suites.len()
    )
    .map_err(io)?;
    if let Some(dir) = &cfg.output.dir {
        for path in emit_report(&report, dir, cfg.output.format)? {
            writeln!(out, "wrote {}", path.display()).map_err(io)?;
        }
    }
    Ok(status)
}

fn list_scenarios(out: &mut impl Write) -> Result<Status> {
    let io = |e: std::io::Error| HarnessError::Io {
        path: "stdout".into(),
        source: e,
    };
    for (name, about) in catalog() {
        let json = serde_json::to_string(&name).expect("scenario serialises");
        writeln!(out, "{:<28} {about}\n{:<28} {json}", name.label(), "").map_err(io)?;
    }
    Ok(Status::Pass)
}

fn merge(
    inputs: &[PathBuf],
    dir: &std::path::Path,
    format: Option<String>,
    out: &mut impl Write,
) -> Result<Status> {
    let reports: Vec<VerificationReport> = inputs
        .iter()
        .map(|p| VerificationReport::load(p))
        .collect::<Result<_>>()?;
    let merged = merge_reports(&reports)?;
    for path in emit_report(&merged, dir, parse_format(format)?.unwrap_or_default())? {
        writeln!(out, "wrote {}", path.display()).map_err(|e| HarnessError::Io {
            path: "stdout".into(),
            source: e,
        })?;
    }
    Ok(merged.status())
}

/// Run the command line on `args` (program name first), writing the
/// terminal report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify {
            suite,
            config,
            bins,
            levels,
            buffer,
            seed,
            out: dir,
            format,
        } => verify(
            suite,
            config,
            (bins, levels, buffer, seed),
            dir,
            format,
            out,
        ),
        Command::Scenarios {
            action: ScenarioAction::List,
        } => list_scenarios(out),
        Command::Report {
            action:
                ReportAction::Merge {
                    inputs,
                    out: dir,
                    format,
                },
        } => merge(&inputs, &dir, format, out),
    };
    match result {
        Ok(Status::Pass) => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
