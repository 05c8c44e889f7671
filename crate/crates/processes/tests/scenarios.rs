use fock_core::GridConfig;
use processes::{basic_process, catalog, kernel_process, scenario, BasicKind, KernelSpec};

#[test]
fn catalog_quadruples_pass_checks_at_four_bins() {
    let grid = GridConfig::new(4).unwrap();
    for (name, _) in catalog() {
        let q = scenario(&name, grid, 4).unwrap().quadruple;
        assert!(q.symmetry_residual().unwrap() <= 1e-12, "{}", name.label());
        assert!(
            q.adaptedness_residual().unwrap() <= 1e-12,
            "{}",
            name.label()
        );
    }
}

#[test]
fn kernel_norms_bounded_on_every_grid() {
    for n in [2, 4, 8] {
        let grid = GridConfig::new(n).unwrap();
        let spec = KernelSpec::seeded(2, 0.8, 21);
        let j = if n == 8 { 3 } else { 4 };
        let k = kernel_process(&spec, grid, j).unwrap();
        for m in 0..=n {
            let b = k.block_norms(m);
            assert!(b.iter().all(|&x| x <= 0.8 + 1e-12), "n={n} m={m}");
        }
    }
}

#[test]
fn creation_equals_adjoint_samplewise() {
    let grid = GridConfig::new(5).unwrap();
    let a = basic_process(grid, 3, BasicKind::Annihilation).unwrap();
    let c = basic_process(grid, 3, BasicKind::Creation).unwrap();
    assert_eq!(a.adjoint().unwrap().max_abs_diff(&c).unwrap(), 0.0);
}
