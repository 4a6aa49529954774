mod common;

use common::*;
use proptest::prelude::*;
use topodyn::chain::chain_components;
use topodyn::pseudo::is_chain;

#[test]
fn scc_components_match_transitive_closure_on_corpus() {
    for (name, sys) in corpus() {
        for delta in dyadics(6).into_iter().chain([0.0]) {
            let dec = chain_components(&sys, delta).unwrap();
            assert_eq!(as_sets(&dec.components), closure_components(&sys, delta), "{name} delta {delta}");
        }
    }
}

#[test]
fn restriction_to_cr_keeps_cr() {
    for (name, sys) in corpus() {
        for delta in dyadics(5) {
            let dec = chain_components(&sys, delta).unwrap();
            if dec.cr.is_empty() {
                continue;
            }
            // CR_delta of a bijection is invariant, so restriction is defined
            let (sub, old) = sys.restrict(&dec.cr).unwrap();
            let again = chain_components(&sub, delta).unwrap();
            assert_eq!(members(&sys.lift(&again.cr, &old)), members(&dec.cr), "{name} delta {delta}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smaller_delta_refines(seed in any::<u64>(), k in 1u32..6) {
        let mut r = rng(seed);
        let sys = if seed % 2 == 0 { random_permutation_system(&mut r, 30) } else { random_truncation(&mut r) };
        let (d1, d2) = (0.5f64.powi(k as i32 + 1), 0.5f64.powi(k as i32));
        let fine = chain_components(&sys, d1).unwrap();
        let coarse = chain_components(&sys, d2).unwrap();
        prop_assert!(fine.cr.is_subset(&coarse.cr));
        for c in &fine.components {
            prop_assert!(coarse.components.iter().any(|big| c.iter().all(|x| big.contains(x))));
        }
    }

    #[test]
    fn orbit_segments_are_zero_chains(seed in any::<u64>(), k in 1usize..40) {
        let mut r = rng(seed);
        let sys = random_truncation(&mut r);
        let x = seed as usize % sys.len();
        let seg = sys.orbit(x, k.min(sys.len()) + 1);
        prop_assert!(is_chain(&sys, &seg, 0.0, sys.tolerance()).unwrap());
    }
}
