use std::sync::Arc;

use cmx::{adaptedness_residual, ampliate, linalg, ChaosMatrix, FockBasis, ScalarMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_banded(b: &Arc<FockBasis>, band: usize, seed: u64) -> ChaosMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = ChaosMatrix::zeros(b.clone(), Some(band));
    for i in 0..=b.max_level() {
        for j in 0..=b.max_level() {
            if i.abs_diff(j) <= band {
                t.set_block(i, j, linalg::random_matrix(b.dim(i), b.dim(j), &mut rng))
                    .unwrap();
            }
        }
    }
    t
}

fn scalar(t: &ChaosMatrix) -> ScalarMatrix {
    ScalarMatrix::new(t.block_norms()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_reverses_products(n in 1usize..4, j in 1usize..4, bs in 0usize..3, bt in 0usize..3, seed in any::<u64>()) {
        let b = FockBasis::shared(n, j).unwrap();
        let s = random_banded(&b, bs, seed);
        let t = random_banded(&b, bt, seed.wrapping_add(1));
        let lhs = s.mul(&t).unwrap().adjoint();
        let rhs = t.adjoint().mul(&s.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn scalar_matrix_is_submultiplicative(n in 1usize..4, j in 1usize..4, seed in any::<u64>()) {
        let b = FockBasis::shared(n, j).unwrap();
        let x = random_banded(&b, 1, seed);
        let y = random_banded(&b, 1, seed ^ 0xabc);
        let lhs = scalar(&x.mul(&y).unwrap());
        let rhs = scalar(&x).mul(&scalar(&y));
        prop_assert!(lhs.precedes(&rhs, 1e-10));
    }

    #[test]
    fn ampliations_stay_adapted(n in 1usize..5, j in 0usize..4, m in 0usize..5, seed in any::<u64>()) {
        let m = m % (n + 1);
        let full = FockBasis::shared(n, j).unwrap();
        let past = FockBasis::shared(m, j).unwrap();
        let a = ampliate(&random_banded(&past, 1, seed), &full).unwrap();
        for m2 in m..=n {
            prop_assert!(adaptedness_residual(&a, m2).unwrap() <= 1e-12);
        }
    }
}
