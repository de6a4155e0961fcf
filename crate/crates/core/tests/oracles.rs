//! Property suites against brute-force oracles on small random games.

mod common;

use proptest::prelude::*;

use common::oracle::*;

fn holds(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nego_is_monotone_and_non_decreasing(seed in any::<u64>(), n in 1usize..=4, l1 in any::<u64>(), l2 in any::<u64>()) {
        holds(nego_case(seed, n, l1, l2))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ne_check_matches_value_brute_force(seed in any::<u64>(), n in 1usize..=4, mp in any::<bool>()) {
        holds(ne_case(seed, n, mp))?;
    }

    #[test]
    fn verify_xrse_matches_deviation_brute_force(
        seed in any::<u64>(), live in 1usize..=3, terms in 1usize..=2, states in 1usize..=2, pseed in 0u8..4,
    ) {
        holds(xrse_case(seed, live, terms, states, pseed))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn optimist_algorithms_match_edge_set_oracle(seed in any::<u64>(), live in 1usize..=3, terms in 1usize..=2, b in any::<u64>()) {
        holds(optimist_case(seed, live, terms, b, false))?;
    }

    #[test]
    fn optimist_algorithms_with_signed_payoffs(seed in any::<u64>(), live in 1usize..=3, terms in 1usize..=2, b in any::<u64>()) {
        holds(optimist_case(seed, live, terms, b, true))?;
    }

    #[test]
    fn energy_ne_matches_deviation_brute_force(seed in any::<u64>(), n in 1usize..=4, states in 1usize..=2) {
        holds(energy_case(seed, n, states))?;
    }
}
