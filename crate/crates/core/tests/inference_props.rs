mod common;

use causal_control::cbn::{configurations, Assignment, Cbn};
use causal_control::controllability::{optimal_policy_value, Budget, Direction};
use causal_control::graph::{NodeId, NodeSet};
use causal_control::intervention::{
    apply_intervention, build_idag, i_subsumes, scope_for_class, InterventionPair,
    InterventionPolicy, IpClass,
};
use causal_control::random::rng;
use common::{arb_cbn, joint_gap, mask_set};
use proptest::prelude::*;
use rand::Rng;

/// A random policy on `target` reading `scope`.
fn random_policy(cbn: &Cbn, target: NodeId, scope: Vec<NodeId>, seed: u64) -> InterventionPolicy {
    let mut r = rng(seed);
    let rows: usize = scope.iter().map(|s| cbn.card(*s)).product();
    let mut table = Vec::new();
    for _ in 0..rows {
        let p: f64 = (r.random_range(0..=8) as f64) / 8.0;
        table.extend([p, 1.0 - p]);
    }
    InterventionPolicy::new(cbn.dag(), cbn.cards(), target, scope, table).unwrap()
}

/// The same policy over a larger scope, ignoring the extra members.
fn widen(cbn: &Cbn, policy: &InterventionPolicy, scope: Vec<NodeId>) -> InterventionPolicy {
    let cards: Vec<usize> = scope.iter().map(|s| cbn.card(*s)).collect();
    let mut table = Vec::new();
    for cfg in configurations(&cards) {
        let mut state = vec![0; cbn.dag().len()];
        for (s, x) in scope.iter().zip(&cfg) {
            state[s.index()] = *x;
        }
        let row = policy.table().row_index(&state);
        table.extend_from_slice(policy.table().row(row));
    }
    InterventionPolicy::new(cbn.dag(), cbn.cards(), policy.target(), scope, table).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn marginals_are_normalized(cbn in arb_cbn(6)) {
        for v in cbn.dag().nodes() {
            let total: f64 = (0..cbn.card(v))
                .map(|x| cbn.marginal_prob(&Assignment::new().with(v, x)).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn conditional_times_evidence_is_joint(cbn in arb_cbn(5), a in 0usize..5, b in 0usize..5, xa in 0usize..2, xb in 0usize..2) {
        let n = cbn.dag().len();
        prop_assume!(a < n && b < n && a != b);
        let a = cbn.dag().node_at(a).unwrap();
        let b = cbn.dag().node_at(b).unwrap();
        let ev_a = Assignment::new().with(a, xa);
        let ev_b = Assignment::new().with(b, xb);
        let pb = cbn.marginal_prob(&ev_b).unwrap();
        let pab = cbn.marginal_prob(&ev_a.clone().with(b, xb)).unwrap();
        if pb == 0.0 {
            prop_assert!(cbn.conditional_prob(&ev_a, &ev_b).is_err());
        } else {
            let cond = cbn.conditional_prob(&ev_a, &ev_b).unwrap();
            prop_assert!((cond * pb - pab).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_intervention_is_identity(cbn in arb_cbn(5)) {
        let same = apply_intervention(&cbn, &InterventionPair::empty()).unwrap();
        prop_assert!(joint_gap(&cbn, &same) == 0.0);
    }

    /// A policy with a wider scope that ignores the extra members
    /// i-subsumes the original and reproduces its joint distribution.
    #[test]
    fn wider_scope_embeds_narrow_policy(cbn in arb_cbn(5), targets in 1u32..32, class in 0usize..3, seed in any::<u64>()) {
        let dag = cbn.dag();
        let targets = mask_set(dag, targets);
        prop_assume!(!targets.is_empty());
        let class = [IpClass::ATOMIC, IpClass::finite(1), IpClass::finite(2)][class];
        let mut narrow = InterventionPair::empty();
        let mut wide = InterventionPair::empty();
        for (i, &t) in targets.iter().enumerate() {
            let small: Vec<NodeId> = scope_for_class(dag, t, class).unwrap().into_iter().collect();
            let big: Vec<NodeId> = scope_for_class(dag, t, IpClass::INFINITE).unwrap().into_iter().collect();
            let p = random_policy(&cbn, t, small, seed.wrapping_add(i as u64));
            wide.insert(widen(&cbn, &p, big));
            narrow.insert(p);
        }
        let id_wide = build_idag(dag, &wide).unwrap();
        let id_narrow = build_idag(dag, &narrow).unwrap();
        prop_assert!(i_subsumes(&id_wide, &id_narrow).unwrap());
        let a = apply_intervention(&cbn, &narrow).unwrap();
        let b = apply_intervention(&cbn, &wide).unwrap();
        prop_assert!(joint_gap(&a, &b) < 1e-12);
    }

    #[test]
    fn richer_classes_never_do_worse(cbn in arb_cbn(5), drivers in 0u32..32, t in 0usize..5, want in 0usize..2) {
        let dag = cbn.dag();
        prop_assume!(t < dag.len());
        let target = dag.node_at(t).unwrap();
        let drivers: NodeSet = mask_set(dag, drivers);
        let desired = Assignment::new().with(target, want);
        let budget = Budget::default();
        let classes = [IpClass::ATOMIC, IpClass::finite(1), IpClass::finite(2), IpClass::INFINITE];
        for dir in [Direction::Max, Direction::Min] {
            let values: Vec<f64> = classes
                .iter()
                .map(|&c| optimal_policy_value(&cbn, &drivers, c, &desired, dir, &budget).unwrap().value)
                .collect();
            for w in values.windows(2) {
                match dir {
                    Direction::Max => prop_assert!(w[0] <= w[1] + 1e-9),
                    Direction::Min => prop_assert!(w[0] >= w[1] - 1e-9),
                }
            }
        }
    }
}
