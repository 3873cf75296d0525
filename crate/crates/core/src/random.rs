//! Seeded random networks and control instances.
//!
//! Everything here is a pure function of the seed; there is no ambient
//! entropy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cbn::{Assignment, Cbn, Cpd};
use crate::controllability::{ControlProblem, Objective};
use crate::error::Result;
use crate::graph::{Dag, NodeSet};

/// Shape of the instances [`random_instance`] draws.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Probability of each edge allowed by the hidden causal order.
    pub edge_prob: f64,
    pub card: usize,
    /// Probability that a node is intervenable.
    pub intervenable_prob: f64,
    pub max_targets: usize,
    /// Probability that a CPD row is a point mass rather than a random row.
    pub point_mass_prob: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            min_nodes: 3,
            max_nodes: 6,
            edge_prob: 0.5,
            card: 2,
            intervenable_prob: 0.5,
            max_targets: 2,
            point_mass_prob: 0.2,
        }
    }
}

/// A parametrized network with an intervenable set and a desired
/// realization of the targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub cbn: Cbn,
    pub intervenable: NodeSet,
    pub desired: Assignment,
}

impl Instance {
    pub fn problem(&self, objective: Objective) -> Result<ControlProblem> {
        ControlProblem::new(
            self.cbn.dag().clone(),
            self.intervenable.clone(),
            self.desired.clone(),
            objective,
        )
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG on `n` nodes named `v0..`. The causal order is a random
/// permutation of the insertion order, so insertion order is not always
/// topological.
pub fn random_dag(rng: &mut impl Rng, n: usize, edge_prob: f64) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((order[i], order[j]));
            }
        }
    }
    let names = (0..n).map(|i| format!("v{i}")).collect();
    Dag::from_indices(names, &edges).expect("edges follow a total order")
}

/// A probability row with entries on a 1e-4 grid.
fn random_row(rng: &mut impl Rng, card: usize, point_mass_prob: f64) -> Vec<f64> {
    if rng.random_bool(point_mass_prob) {
        let hot = rng.random_range(0..card);
        return (0..card)
            .map(|x| if x == hot { 1.0 } else { 0.0 })
            .collect();
    }
    const SCALE: u32 = 10_000;
    let weights: Vec<f64> = (0..card).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut ticks: Vec<u32> = weights
        .iter()
        .map(|w| (w / total * SCALE as f64).floor() as u32)
        .collect();
    let short = SCALE - ticks.iter().sum::<u32>();
    for t in ticks.iter_mut().take(short as usize) {
        *t += 1;
    }
    ticks.iter().map(|&t| t as f64 / SCALE as f64).collect()
}

/// Random CPDs for every node of `dag`.
pub fn random_parametrization(
    rng: &mut impl Rng,
    dag: &Dag,
    cards: Vec<usize>,
    point_mass_prob: f64,
) -> Result<Cbn> {
    let mut cpds = Vec::with_capacity(dag.len());
    for v in dag.nodes() {
        let parents = dag.parents(v).to_vec();
        let rows: usize = parents.iter().map(|p| cards[p.index()]).product();
        let mut table = Vec::with_capacity(rows * cards[v.index()]);
        for _ in 0..rows {
            table.extend(random_row(rng, cards[v.index()], point_mass_prob));
        }
        cpds.push(Cpd::new(dag, &cards, v, parents, table)?);
    }
    Cbn::new(dag.clone(), cards, cpds)
}

/// Draws one instance from `seed`.
pub fn random_instance(seed: u64, config: &RandomConfig) -> Instance {
    let mut rng = rng(seed);
    let n = rng.random_range(config.min_nodes..=config.max_nodes);
    let dag = random_dag(&mut rng, n, config.edge_prob);
    let cbn = random_parametrization(&mut rng, &dag, vec![config.card; n], config.point_mass_prob)
        .expect("generated tables are valid");
    let intervenable: NodeSet = dag
        .nodes()
        .filter(|_| rng.random_bool(config.intervenable_prob))
        .collect();
    let mut nodes: Vec<_> = dag.nodes().collect();
    nodes.shuffle(&mut rng);
    let k = rng.random_range(1..=config.max_targets.clamp(1, n));
    let desired = nodes
        .into_iter()
        .take(k)
        .map(|t| (t, rng.random_range(0..config.card)))
        .collect();
    Instance {
        seed,
        cbn,
        intervenable,
        desired,
    }
}
