//! Properties over randomly generated terms and formulae.

use chorcheck_core::checker::{entails, expand_derived, satisfies_naive};
use chorcheck_core::gen::{self, ChorShape};
use chorcheck_core::semantics::{norm, step, struct_equiv, Configuration};
use chorcheck_core::syntax::{parse_choreography_open, parse_formula, print_choreography, print_formula};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small() -> ChorShape {
    ChorShape {
        max_prefixes: 5,
        ..ChorShape::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recursive_terms_round_trip(seed in any::<u64>()) {
        let c = gen::choreography(&mut rng(seed), ChorShape { recursion: true, ..ChorShape::default() });
        let text = print_choreography(&c);
        let back = parse_choreography_open(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(back.alpha_eq(&c), "{}", text);
    }

    #[test]
    fn formulae_round_trip(seed in any::<u64>()) {
        let f = gen::formula(&mut rng(seed), 5);
        let text = print_formula(&f);
        let back = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f, "{}", text);
    }

    #[test]
    fn expansion_is_core(seed in any::<u64>()) {
        let f = gen::formula(&mut rng(seed), 4);
        prop_assert!(expand_derived(&f).is_core());
    }

    #[test]
    fn norm_product_is_congruent(seed in any::<u64>()) {
        let c = gen::choreography(&mut rng(seed), ChorShape::default());
        let p = chorcheck_core::ast::Choreography::product(norm(&c).unwrap());
        prop_assert!(struct_equiv(&p, &c).unwrap());
    }

    #[test]
    fn classical_negation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = Configuration::new(gen::state(&mut r), gen::choreography(&mut r, small()));
        let f = gen::core_formula(&mut r, 3);
        let v = entails(&cfg, &f).unwrap().holds;
        prop_assert_eq!(entails(&cfg, &chorcheck_core::ast::Formula::neg(chorcheck_core::ast::Formula::neg(f.clone()))).unwrap().holds, v);
        let contradiction = chorcheck_core::ast::Formula::and(f.clone(), chorcheck_core::ast::Formula::neg(f));
        prop_assert!(!entails(&cfg, &contradiction).unwrap().holds);
    }

    #[test]
    fn may_is_reflexive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = Configuration::new(gen::state(&mut r), gen::choreography(&mut r, small()));
        let f = gen::core_formula(&mut r, 3);
        if entails(&cfg, &f).unwrap().holds {
            prop_assert!(entails(&cfg, &chorcheck_core::ast::Formula::may(f)).unwrap().holds);
        }
    }

    #[test]
    fn oracle_agrees_on_small_inputs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = Configuration::new(gen::state(&mut r), gen::choreography(&mut r, small()));
        let f = gen::core_formula(&mut r, 3);
        prop_assert_eq!(entails(&cfg, &f).unwrap().holds, satisfies_naive(&cfg, &f).unwrap());
    }

    #[test]
    fn shuffled_terms_step_alike(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = gen::choreography(&mut r, ChorShape::default());
        let d = gen::shuffle_monoid(&mut r, &c);
        let labels = |c: &chorcheck_core::ast::Choreography| {
            step(&Configuration::empty(c.clone())).into_iter().map(|t| t.label).collect::<std::collections::BTreeSet<_>>()
        };
        prop_assert_eq!(labels(&c), labels(&d));
    }
}
