//! Brute-force oracles and generators shared by the integration tests.
//! Nothing here calls the search or traversal code under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

use causal_control::cbn::{configurations, Assignment, Cbn};
use causal_control::graph::{Dag, NodeId, NodeSet};
use causal_control::intervention::{
    interventional_prob, scope_for_class, InterventionPair, InterventionPolicy, IpClass,
};
use causal_control::random::{random_parametrization, rng};
use proptest::prelude::*;

/// DAG on up to `max_nodes` nodes whose causal order is a shuffle of the
/// insertion order.
pub fn arb_dag(max_nodes: usize) -> impl Strategy<Value = Dag> {
    (1..=max_nodes)
        .prop_flat_map(|n| {
            (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2),
            )
        })
        .prop_map(|(order, bits)| {
            let n = order.len();
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((order[i], order[j]));
                    }
                    k += 1;
                }
            }
            Dag::from_indices((0..n).map(|i| format!("n{i}")).collect(), &edges).unwrap()
        })
}

/// A DAG with a seeded binary parametrization.
pub fn arb_cbn(max_nodes: usize) -> impl Strategy<Value = Cbn> {
    (arb_dag(max_nodes), any::<u64>()).prop_map(|(dag, seed)| {
        let n = dag.len();
        random_parametrization(&mut rng(seed), &dag, vec![2; n], 0.25).unwrap()
    })
}

/// Subset of `0..n` from a bitmask.
pub fn mask_set(dag: &Dag, mask: u32) -> NodeSet {
    dag.nodes().filter(|v| mask >> v.index() & 1 == 1).collect()
}

/// Every simple directed path ending in `end`, as node lists.
fn paths_into(dag: &Dag, end: NodeId) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![end]];
    while let Some(path) = stack.pop() {
        let head = path[0];
        for &p in dag.parents(head) {
            let mut longer = vec![p];
            longer.extend(&path);
            stack.push(longer);
        }
        out.push(path);
    }
    out
}

/// Backward chaining by path enumeration: `u` is visited when some directed
/// path from `u` into `start` avoids `stop` after its first node.
pub fn backward_chain_oracle(dag: &Dag, start: &NodeSet, stop: &NodeSet) -> (NodeSet, NodeSet) {
    let mut visited = NodeSet::new();
    for &t in start {
        for path in paths_into(dag, t) {
            if path[1..].iter().all(|v| !stop.contains(v)) {
                visited.insert(path[0]);
            }
        }
    }
    let terminals = visited.intersection(stop).copied().collect();
    (visited, terminals)
}

/// d-separation by enumerating every simple undirected path.
pub fn d_separated_oracle(dag: &Dag, a: &NodeSet, b: &NodeSet, z: &NodeSet) -> bool {
    let mut desc_or_self: Vec<NodeSet> = Vec::new();
    for v in dag.nodes() {
        let mut d = NodeSet::from([v]);
        let mut frontier = vec![v];
        while let Some(u) = frontier.pop() {
            for &c in dag.children(u) {
                if d.insert(c) {
                    frontier.push(c);
                }
            }
        }
        desc_or_self.push(d);
    }
    let neighbours = |v: NodeId| -> Vec<NodeId> {
        dag.parents(v)
            .iter()
            .chain(dag.children(v))
            .copied()
            .collect()
    };
    let active = |path: &[NodeId]| -> bool {
        path.windows(3).all(|w| {
            let (x, m, y) = (w[0], w[1], w[2]);
            let collider = dag.has_edge(x, m) && dag.has_edge(y, m);
            if collider {
                desc_or_self[m.index()].iter().any(|d| z.contains(d))
            } else {
                !z.contains(&m)
            }
        })
    };
    for &s in a {
        let mut stack = vec![vec![s]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if path.len() > 1 && b.contains(&last) && active(&path) {
                return false;
            }
            for n in neighbours(last) {
                if !path.contains(&n) {
                    let mut next = path.clone();
                    next.push(n);
                    stack.push(next);
                }
            }
        }
    }
    true
}

/// Best value over every deterministic `class` policy on `drivers`, found
/// by enumerating all policy tables and scoring each with full inference.
/// Returns the optimum and the lexicographically first optimal choice
/// vector (drivers in index order, rows in row-major order).
pub fn brute_force_optimum(
    cbn: &Cbn,
    drivers: &NodeSet,
    class: IpClass,
    desired: &Assignment,
    maximize: bool,
) -> (f64, Vec<Vec<usize>>) {
    let dag = cbn.dag();
    let layout: Vec<(NodeId, Vec<NodeId>)> = drivers
        .iter()
        .map(|&d| {
            (
                d,
                scope_for_class(dag, d, class)
                    .unwrap()
                    .into_iter()
                    .collect(),
            )
        })
        .collect();
    let row_counts: Vec<usize> = layout
        .iter()
        .map(|(_, s)| s.iter().map(|v| cbn.card(*v)).product())
        .collect();
    let mut digit_cards = Vec::new();
    for ((d, _), rows) in layout.iter().zip(&row_counts) {
        digit_cards.extend(std::iter::repeat_n(cbn.card(*d), *rows));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for digits in configurations(&digit_cards) {
        let mut pair = InterventionPair::empty();
        let mut at = 0;
        for ((d, scope), rows) in layout.iter().zip(&row_counts) {
            let choices = &digits[at..at + rows];
            at += rows;
            pair.insert(
                InterventionPolicy::deterministic(dag, cbn.cards(), *d, scope.clone(), choices)
                    .unwrap(),
            );
        }
        let v = interventional_prob(cbn, &pair, desired).unwrap();
        let better = match &best {
            None => true,
            Some((b, _)) => {
                if maximize {
                    v > b + 1e-12
                } else {
                    v < b - 1e-12
                }
            }
        };
        if better {
            best = Some((v, digits));
        }
    }
    let (value, digits) = best.unwrap();
    let mut split = Vec::new();
    let mut at = 0;
    for rows in row_counts {
        split.push(digits[at..at + rows].to_vec());
        at += rows;
    }
    (value, split)
}

/// Largest absolute difference between two joint distributions over the
/// same state space.
pub fn joint_gap(a: &Cbn, b: &Cbn) -> f64 {
    let dag = a.dag();
    let mut worst: f64 = 0.0;
    for state in configurations(a.cards()) {
        let full: Assignment = dag.nodes().zip(state.iter().copied()).collect();
        let pa = a.joint_prob(&full).unwrap();
        let pb = b.joint_prob(&full).unwrap();
        worst = worst.max((pa - pb).abs());
    }
    worst
}

pub fn node_pairs(dag: &Dag) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for a in dag.nodes() {
        for b in dag.nodes() {
            if a < b {
                out.insert((a, b));
            }
        }
    }
    out
}
