use harness::{run_config, run_suite, Expect, ScenarioConfig, Status, SuiteId};

fn small(n: usize, big_j: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.grid.n_bins = n;
    cfg.grid.ladder = vec![2, 4, 8];
    cfg.truncation.max_level = big_j;
    cfg
}

#[test]
fn cheap_suites_pass_with_failing_controls() {
    let cfg = small(3, 4);
    for id in [
        SuiteId::BoundsAdjoints,
        SuiteId::MatrixElements,
        SuiteId::Adaptedness,
        SuiteId::FourierCalculus,
        SuiteId::BrownianClassical,
        SuiteId::AnalyticRadius,
    ] {
        let rec = run_suite(id, &cfg).unwrap();
        let controls: Vec<_> = rec.checks.iter().filter(|c| c.expect == Expect::Fail).collect();
        assert!(!controls.is_empty(), "{id} ships no control");
        for c in controls {
            assert_eq!(c.status, Status::Fail, "{id}/{}", c.name);
        }
        if id != SuiteId::AnalyticRadius {
            assert_eq!(rec.status, Status::Pass, "{id}: {:#?}", rec.checks);
        }
    }
}

#[test]
fn every_check_cites_its_tolerance_and_orders_use_three_grids() {
    let cfg = small(3, 4);
    let rec = run_suite(SuiteId::Stratonovich, &cfg).unwrap();
    for c in &rec.checks {
        assert!(!c.tolerance.source.is_empty());
        if let Some(conv) = &c.convergence {
            assert!(conv.rows.len() >= 3, "{}", c.name);
        }
    }
}

#[test]
fn future_shifted_control_fails_with_a_large_residual() {
    let rec = run_suite(SuiteId::Adaptedness, &small(4, 3)).unwrap();
    let c = rec.check("future-shifted").unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(c.value.unwrap() >= 1e-3);
}

#[test]
fn empty_suite_list_gives_an_empty_passing_report() {
    let report = run_config(&ScenarioConfig::default()).unwrap();
    assert!(report.suites.is_empty());
    assert_eq!(report.status(), Status::Pass);
    assert_eq!(report.seed, 7);
}

#[test]
fn capacity_errors_name_the_suite() {
    // x³ needs two levels of buffer.
    let mut cfg = small(4, 1);
    cfg.truncation.buffer = 1;
    let err = run_suite(SuiteId::Stratonovich, &cfg).unwrap_err().to_string();
    assert!(err.contains("stratonovich"), "{err}");
}
