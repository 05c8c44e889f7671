//! Acceptance run: one PASS/FAIL line per criterion, judged against the
//! tolerances pinned below rather than the configured defaults. Red lines
//! are reported, not turned into panics, so the rest of the test run goes on.

use std::time::Instant;

use calculus::{
    duhamel_residual, ito_functional_residual, log_slope, DuhamelOptions, FunctionSpec,
    ItoFormulaOptions, QuadratureConfig, ResidualSeries,
};
use fock_core::GridConfig;
use harness::{run_suite, CheckRecord, ScenarioConfig, SuiteId, SuiteRecord};
use processes::{scenario, KernelParams, ScenarioName};

const EXACT: f64 = 1e-12;
const BOUND: f64 = 1e-10;
const KERNEL_BOUND: f64 = 1e-8;
const QUADRATURE: f64 = 1e-8;
const SCALAR: f64 = 1e-10;
const SYMMETRISATION: f64 = 1e-9;
const ORDER: (f64, f64) = (0.7, 1.5);
const CHARACTERISTIC: f64 = 5e-3;
const RADIUS: f64 = 0.9 / 6.0;
const ADAPTED_FAIL: f64 = 1e-3;
const ABLATION: f64 = 10.0;

const LADDER: [usize; 3] = [2, 4, 8];
const BUFFER: usize = 2;
/// Truncation for single-grid runs at n = 4.
const J_DEFAULT: usize = 6;
/// Ladder runs reach n = 8, where J = 6 (dimension 3003) costs 3 to 10
/// minutes per suite on one core.
const J_LADDER: usize = 5;

struct Item {
    label: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    items: Vec<Item>,
}

impl Criterion {
    fn push(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.items.push(Item {
            label: label.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn at_most(&mut self, label: &str, value: Option<f64>, limit: f64) {
        match value {
            Some(v) => self.push(label, v <= limit, format!("{v:.3e} ≤ {limit:e}")),
            None => self.push(label, false, "missing"),
        }
    }

    fn at_least(&mut self, label: &str, value: Option<f64>, limit: f64) {
        match value {
            Some(v) => self.push(label, v >= limit, format!("{v:.4} ≥ {limit:.4}")),
            None => self.push(label, false, "missing"),
        }
    }

    /// Slope over `(dt, max residual)`; an identity that is exact on every
    /// grid passes outright.
    fn order(&mut self, label: &str, rows: &[(f64, f64)], max: Option<f64>) {
        if rows.len() < 3 {
            return self.push(label, false, format!("{} grid sizes", rows.len()));
        }
        if rows.iter().all(|r| r.1 <= EXACT) {
            return self.push(label, true, "exact on every grid");
        }
        match log_slope(rows) {
            Some(s) => {
                let ok = s >= ORDER.0 && max.is_none_or(|m| s <= m);
                let range = max.map_or(format!("≥ {}", ORDER.0), |m| {
                    format!("in [{}, {m}]", ORDER.0)
                });
                self.push(label, ok, format!("slope {s:.3} {range}"))
            }
            None => self.push(label, false, "no slope"),
        }
    }

    fn record_order(&mut self, label: &str, c: Option<&CheckRecord>, max: Option<f64>) {
        match c {
            Some(c) => self.order(label, &rows_of(c), max),
            None => self.push(label, false, "missing"),
        }
    }

    fn report(&self, id: usize, title: &str) -> bool {
        let ok = self.items.iter().all(|i| i.ok);
        let failed: Vec<&str> = self
            .items
            .iter()
            .filter(|i| !i.ok)
            .map(|i| i.label.as_str())
            .collect();
        let summary = if ok {
            format!("{} checks", self.items.len())
        } else {
            format!(
                "{}/{} red: {}",
                failed.len(),
                self.items.len(),
                failed.join("; ")
            )
        };
        println!(
            "{} criterion {id}: {title} ({summary})",
            if ok { "PASS" } else { "FAIL" }
        );
        for i in &self.items {
            println!(
                "       {} {}: {}",
                if i.ok { "ok " } else { "RED" },
                i.label,
                i.detail
            );
        }
        ok
    }
}

/// Context that does not enter a verdict: the same identities in a weaker
/// norm, where the √dt one-mode terms drop out.
fn info(records: &[(&str, Option<&CheckRecord>)]) {
    for (label, c) in records {
        let slope = c.and_then(|c| {
            let rows = rows_of(c);
            if rows.iter().all(|r| r.1 <= EXACT) {
                Some("exact".to_string())
            } else {
                log_slope(&rows).map(|s| format!("slope {s:.3}"))
            }
        });
        println!(
            "       info {label}: {}",
            slope.unwrap_or_else(|| "missing".into())
        );
    }
}

fn rows_of(c: &CheckRecord) -> Vec<(f64, f64)> {
    c.runs
        .iter()
        .map(|r| (1.0 / r.n_bins as f64, r.max_residual))
        .collect()
}

fn series_rows(runs: &[(usize, ResidualSeries)]) -> Vec<(f64, f64)> {
    runs.iter()
        .map(|(n, r)| (1.0 / *n as f64, r.max()))
        .collect()
}

fn config(scenario: ScenarioName, n: usize, big_j: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig {
        scenario,
        ..Default::default()
    };
    cfg.grid.n_bins = n;
    cfg.grid.ladder = LADDER.to_vec();
    cfg.truncation.max_level = big_j;
    cfg.truncation.buffer = BUFFER;
    cfg
}

struct Runner {
    errors: Vec<String>,
}

impl Runner {
    fn suite(&mut self, id: SuiteId, cfg: &ScenarioConfig) -> Option<SuiteRecord> {
        let start = Instant::now();
        match run_suite(id, cfg) {
            Ok(r) => {
                eprintln!(
                    "  ran {id} [{}] in {:.1}s",
                    r.scenario,
                    start.elapsed().as_secs_f64()
                );
                Some(r)
            }
            Err(e) => {
                self.errors.push(format!("{id}: {e}"));
                None
            }
        }
    }
}

fn check<'a>(s: &'a Option<SuiteRecord>, name: &str) -> Option<&'a CheckRecord> {
    s.as_ref().and_then(|s| s.check(name))
}

fn value(s: &Option<SuiteRecord>, name: &str) -> Option<f64> {
    check(s, name).and_then(|c| c.value)
}

fn duhamel_ladder(name: &ScenarioName, p: f64) -> calculus::Result<Vec<(usize, ResidualSeries)>> {
    let opts = DuhamelOptions {
        buffer: BUFFER,
        ..Default::default()
    };
    LADDER
        .iter()
        .map(|&n| {
            let q = scenario(name, GridConfig::new(n).unwrap(), J_LADDER)
                .unwrap()
                .quadruple;
            Ok((
                n,
                duhamel_residual(&q, p, &QuadratureConfig::default(), &opts)?,
            ))
        })
        .collect()
}

fn ito_ladder(name: &ScenarioName) -> calculus::Result<Vec<(usize, ResidualSeries)>> {
    let opts = ItoFormulaOptions {
        buffer: BUFFER,
        drift: true,
    };
    LADDER
        .iter()
        .map(|&n| {
            let q = scenario(name, GridConfig::new(n).unwrap(), J_LADDER)
                .unwrap()
                .quadruple;
            Ok((
                n,
                ito_functional_residual(
                    &q,
                    &FunctionSpec::gaussian(1.0),
                    &QuadratureConfig::default(),
                    &opts,
                )?,
            ))
        })
        .collect()
}

fn main() {
    let start = Instant::now();
    let mut run = Runner { errors: vec![] };
    let brownian = ScenarioName::brownian();
    let rotated = ScenarioName::Rotated {
        theta: Default::default(),
    };
    let kernel = ScenarioName::kernel_band(1, 1.0, 7);
    let kernel_gauge = ScenarioName::KernelBand {
        band: 1,
        xi: 1.0,
        seed: 7,
        gauge: true,
    };
    let gauge_only = ScenarioName::Polynomial {
        expr: "1 L".parse().unwrap(),
    };
    let perturbed = ScenarioName::Perturbed {
        base: Box::new(brownian.clone()),
        perturbation: KernelParams {
            band: 1,
            xi: 0.5,
            seed: 8,
        },
    };
    let mut verdicts = vec![];

    // Shared runs.
    let small = |s: &ScenarioName| config(s.clone(), 4, J_DEFAULT);
    let elements = run.suite(SuiteId::MatrixElements, &small(&brownian));
    let adapted: Vec<_> = [&brownian, &kernel_gauge]
        .iter()
        .map(|s| (s.label(), run.suite(SuiteId::Adaptedness, &small(s))))
        .collect();
    let bounds: Vec<_> = [&brownian, &gauge_only, &kernel, &kernel_gauge]
        .iter()
        .map(|s| (s.label(), run.suite(SuiteId::BoundsAdjoints, &small(s))))
        .collect();
    let strat = run.suite(
        SuiteId::Stratonovich,
        &config(brownian.clone(), 4, J_LADDER),
    );
    let expansion = run.suite(SuiteId::DuhamelExpansion, &small(&brownian));
    let product = run.suite(SuiteId::ItoProduct, &config(brownian.clone(), 4, J_LADDER));
    let powers = run.suite(SuiteId::Powers, &config(brownian.clone(), 4, J_LADDER));

    // 1. Exact discrete identities.
    let mut c = Criterion::default();
    c.at_most(
        "matrix elements vs direct integral",
        value(&elements, "exponential-vector-elements"),
        EXACT,
    );
    for (label, b) in &bounds {
        c.at_most(
            &format!("adjoint relations, {label}"),
            value(b, "adjoint-identities"),
            EXACT,
        );
    }
    for (label, a) in &adapted {
        c.at_most(
            &format!("integrands adapted, {label}"),
            value(a, "integrands-adapted"),
            EXACT,
        );
        c.at_most(
            &format!("integrals adapted, {label}"),
            value(a, "integral-adapted"),
            EXACT,
        );
    }
    c.at_most("Stratonovich f(x)=x", value(&strat, "f(x)=x"), EXACT);
    c.at_most(
        "CCR on buffered levels",
        value(&elements, "ccr-buffered"),
        EXACT,
    );
    c.at_most(
        "exponential vector factorization",
        value(&elements, "exponential-vector-factorization"),
        EXACT,
    );
    verdicts.push(c.report(1, "exact discrete identities"));

    // 2. Bounds.
    let mut c = Criterion::default();
    for (label, b) in &bounds {
        c.at_most(
            &format!("block norms, {label}"),
            value(b, "block-norm-bounds"),
            BOUND,
        );
    }
    c.at_most(
        "Duhamel expansion kernels n ≤ 6",
        value(&expansion, "kernel-bounds n≤6"),
        KERNEL_BOUND,
    );
    verdicts.push(c.report(2, "integral and expansion bounds"));

    // 3. Convergence order one.
    let mut c = Criterion::default();
    let top = Some(ORDER.1);
    for pair in ["dA·dA†", "dA·dΛ", "dΛ·dA†", "dΛ·dΛ"] {
        c.record_order(&format!("Ito product {pair}"), check(&product, pair), top);
    }
    c.record_order("powers n=2", check(&powers, "power-2"), top);
    c.record_order("powers n=3", check(&powers, "power-3"), top);
    let duhamel = run.suite(SuiteId::Duhamel, &config(brownian.clone(), 4, J_LADDER));
    for p in ["0.5", "1", "2"] {
        c.record_order(
            &format!("Duhamel brownian p={p}"),
            check(&duhamel, &format!("p={p}")),
            top,
        );
    }
    for (label, name) in [
        ("kernel_band(1)", &kernel),
        ("rotated", &rotated),
        ("perturbed", &perturbed),
    ] {
        let t = Instant::now();
        match duhamel_ladder(name, 1.0) {
            Ok(runs) => c.order(&format!("Duhamel {label} p=1"), &series_rows(&runs), top),
            Err(e) => run.errors.push(format!("duhamel {label}: {e}")),
        }
        eprintln!("  ran duhamel {label} in {:.1}s", t.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    match ito_ladder(&brownian) {
        Ok(runs) => c.order(
            "functional Ito gaussian(1), brownian",
            &series_rows(&runs),
            top,
        ),
        Err(e) => run.errors.push(format!("ito brownian: {e}")),
    }
    eprintln!(
        "  ran functional Ito brownian in {:.1}s",
        t.elapsed().as_secs_f64()
    );
    let ito_rot = run.suite(
        SuiteId::ItoFunctional,
        &config(rotated.clone(), 4, J_LADDER),
    );
    c.record_order(
        "functional Ito gaussian(1), rotated",
        check(&ito_rot, "gaussian(1)"),
        top,
    );
    c.record_order("Stratonovich f(x)=x²", check(&strat, "f(x)=x²"), None);
    verdicts.push(c.report(3, "convergence order one in dt"));
    info(&[
        (
            "Ito product dA·dΛ, exponential vectors",
            check(&product, "dA·dΛ exponential vectors"),
        ),
        (
            "Ito product dΛ·dA†, exponential vectors",
            check(&product, "dΛ·dA† exponential vectors"),
        ),
        (
            "Ito product dΛ·dΛ, exponential vectors",
            check(&product, "dΛ·dΛ exponential vectors"),
        ),
        (
            "Duhamel brownian p=2, levels ≤ 1",
            check(&duhamel, "p=2 levels≤1"),
        ),
        (
            "functional Ito gaussian(1) rotated, levels ≤ 1",
            check(&ito_rot, "gaussian(1) levels≤1"),
        ),
    ]);

    // 4. Oracle agreements.
    let mut c = Criterion::default();
    let fourier = run.suite(
        SuiteId::FourierCalculus,
        &config(brownian.clone(), 4, J_DEFAULT),
    );
    let series = run.suite(
        SuiteId::SeriesVsQuadrature,
        &config(brownian.clone(), 4, J_DEFAULT),
    );
    let classical = run.suite(
        SuiteId::BrownianClassical,
        &config(brownian.clone(), 4, J_DEFAULT),
    );
    c.at_most(
        "fourier vs spectral, gaussian(1) on B_1",
        value(&fourier, "fourier-vs-spectral gaussian(1)"),
        QUADRATURE,
    );
    c.at_most(
        "series N=12 vs quadrature",
        value(&series, "N=12"),
        QUADRATURE,
    );
    c.at_most(
        "scalar reductions of Df, D²f",
        value(&classical, "scalar-reductions"),
        SCALAR,
    );
    c.at_most(
        "symmetrisation identity",
        value(&fourier, "second-differential-symmetrisation"),
        SYMMETRISATION,
    );
    verdicts.push(c.report(4, "oracle agreements"));

    // 5. Quantitative spot values.
    let mut c = Criterion::default();
    let radius = run.suite(
        SuiteId::AnalyticRadius,
        &config(brownian.clone(), 4, J_DEFAULT),
    );
    c.at_most(
        "|⟨vac, e^{iB_1} vac⟩ - e^{-1/2}|, n=4, J=6",
        value(&fourier, "vacuum-characteristic-function"),
        CHARACTERISTIC,
    );
    c.at_least(
        "radius, band-1 κ with entries i+j",
        value(&radius, "band-1 entries i+j"),
        RADIUS,
    );
    c.record_order(
        "A_t² vs 2∫A dA, operator norm",
        check(&powers, "a-squared-operator-norm"),
        top,
    );
    verdicts.push(c.report(5, "quantitative spot values"));
    info(&[(
        "A_t² vs 2∫A dA, exponential vectors",
        check(&powers, "a-squared-exponential-vectors"),
    )]);

    // 6. Negative controls fail rather than error.
    let mut c = Criterion::default();
    for (label, a) in &adapted {
        let shifted = check(a, "future-shifted");
        let v = shifted.and_then(|x| x.value);
        let failed = shifted.is_some_and(|x| x.status == harness::Status::Fail);
        c.push(
            format!("future-shifted process, {label}"),
            failed && v.is_some_and(|v| v >= ADAPTED_FAIL),
            format!(
                "{:?}, residual {:.3e} ≥ {ADAPTED_FAIL:e}",
                shifted.map(|x| x.status),
                v.unwrap_or(f64::NAN)
            ),
        );
    }
    c.at_least(
        "Ito correction dropped, inflation",
        value(&product, "dropped-correction"),
        ABLATION,
    );
    c.at_least(
        "θ′Q drift dropped, inflation",
        value(&ito_rot, "dropped-drift"),
        ABLATION,
    );
    verdicts.push(c.report(6, "negative controls"));

    // 7. Determinism.
    let mut c = Criterion::default();
    for (id, s) in [
        (SuiteId::MatrixElements, &brownian),
        (SuiteId::BoundsAdjoints, &kernel_gauge),
    ] {
        let cfg = small(s);
        let a = run.suite(id, &cfg);
        let b = run.suite(id, &cfg);
        let json = |r: &Option<SuiteRecord>| {
            r.as_ref().map(|r| {
                let mut rep = harness::VerificationReport::new(cfg.clone());
                rep.suites.push(r.clone());
                rep.without_timing().to_json()
            })
        };
        let same = json(&a).is_some() && json(&a) == json(&b);
        c.push(
            format!("{id} on {}", s.label()),
            same,
            if same { "byte-identical" } else { "differs" },
        );
    }
    verdicts.push(c.report(7, "determinism"));

    for e in &run.errors {
        println!("ERROR {e}");
    }
    let passed = verdicts.iter().filter(|v| **v).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {} errors, {:.0}s",
        verdicts.len(),
        run.errors.len(),
        start.elapsed().as_secs_f64()
    );
}
