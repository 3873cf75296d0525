mod common;

use causal_control::cbn::Assignment;
use causal_control::controllability::{optimal_policy_value, Budget, Direction};
use causal_control::intervention::{interventional_prob, scope_for_class, IpClass};
use common::{arb_cbn, brute_force_optimum, mask_set};
use proptest::prelude::*;

const CLASSES: [IpClass; 4] = [
    IpClass::ATOMIC,
    IpClass::finite(1),
    IpClass::finite(2),
    IpClass::INFINITE,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn search_matches_policy_enumeration(
        cbn in arb_cbn(5),
        drivers in 0u32..32,
        targets in 1u32..32,
        wants in any::<u32>(),
        class in 0usize..4,
        maximize in any::<bool>(),
    ) {
        let dag = cbn.dag();
        let class = CLASSES[class];
        let drivers = mask_set(dag, drivers);
        let targets = mask_set(dag, targets);
        prop_assume!(!targets.is_empty());
        let desired: Assignment = targets
            .iter()
            .map(|&t| (t, (wants >> t.index() & 1) as usize))
            .collect();
        let table_bits: usize = drivers
            .iter()
            .map(|&d| 1usize << scope_for_class(dag, d, class).unwrap().len())
            .sum();
        prop_assume!(table_bits <= 12);

        let dir = if maximize { Direction::Max } else { Direction::Min };
        let found = optimal_policy_value(&cbn, &drivers, class, &desired, dir, &Budget::default()).unwrap();
        let (value, choices) = brute_force_optimum(&cbn, &drivers, class, &desired, maximize);
        prop_assert!((found.value - value).abs() < 1e-9, "search {} vs enumeration {}", found.value, value);

        // The witness really achieves the value and is the first optimum.
        let replay = interventional_prob(&cbn, &found.witness, &desired).unwrap();
        prop_assert!((replay - found.value).abs() < 1e-12);
        let witness: Vec<Vec<usize>> = found.witness.policies().map(|p| p.choices().unwrap()).collect();
        prop_assert_eq!(witness, choices);
    }
}
