//! Finite-sample validity of the permutation tests on a fully enumerable layout.

mod common;

use common::*;
use permancova::hypothesis_tests::run_method;
use permancova::randomization::{PermutationPlan, StratumLayout};

const SIZES: [usize; 2] = [4, 4];
const TREATED: [usize; 2] = [2, 2];

#[test]
fn assignment_tests_are_exact_for_fixed_populations() {
    // With y fixed, the observed assignment is uniform over the 36, so at most
    // floor(alpha * 36) of them may give p <= alpha.
    for seed in 0..20 {
        let (x, y) = sharp_null_population(seed, 8);
        for m in ASSIGNMENT_TESTS {
            let ps = exact_p_over_assignments(m, &SIZES, &TREATED, &x, &y);
            assert_eq!(ps.len(), 36);
            for &alpha in &ps {
                let k = ps.iter().filter(|&&p| p <= alpha + 1e-12).count();
                assert!(k as f64 <= alpha * 36.0 + 1e-9, "{m} seed {seed}: {k} of 36 at {alpha}");
            }
        }
    }
}

#[test]
fn residual_tests_are_super_uniform_under_sharp_null() {
    let alphas = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5];
    let populations = 400;
    for m in RESIDUAL_TESTS {
        let rates = sharp_null_rejection_rates(m, &SIZES, &TREATED, populations, &alphas);
        for (&a, &r) in alphas.iter().zip(&rates) {
            let se = (a * (1.0 - a) / populations as f64).sqrt();
            assert!(r <= a + 3.0 * se, "{m}: rate {r} at alpha {a}");
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let b = 10_000;
    for seed in 0..2 {
        let data = random_trial(40 + seed, &SIZES, &TREATED, 0.8, 0.9);
        let layout = StratumLayout::new(SIZES.to_vec(), TREATED.to_vec()).unwrap();
        let exact = PermutationPlan::exact(layout.clone());
        let mc = PermutationPlan::monte_carlo(layout, b, 500 + seed).unwrap();
        for m in ASSIGNMENT_TESTS.into_iter().chain(RESIDUAL_TESTS) {
            let pe = run_method(m, &data, &exact).unwrap().p();
            let pm = run_method(m, &data, &mc).unwrap().p();
            let tol = 3.0 * (pe * (1.0 - pe) / b as f64).sqrt();
            assert!((pe - pm).abs() <= tol, "{m} seed {seed}: exact {pe} vs mc {pm}");
        }
    }
}
