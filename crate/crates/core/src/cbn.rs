//! Fully parameterized discrete causal Bayesian networks with exact queries
//! by enumeration.
//!
//! Tables are stored row-major: the row for a parent configuration is found
//! by reading the parent values as a mixed-radix number whose first parent is
//! the most significant digit, and each row lists the owner's probabilities in
//! value order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeSet};

/// Row-sum tolerance for CPD validation.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// A conditional probability table for one node.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpd {
    owner: NodeId,
    card: usize,
    parents: Vec<NodeId>,
    strides: Vec<usize>,
    table: Vec<f64>,
}

impl Cpd {
    /// Validates `table` against the cardinalities in `cards` (indexed by
    /// node). `parents` fixes the row order and may be any permutation the
    /// caller likes.
    pub fn new(
        dag: &Dag,
        cards: &[usize],
        owner: NodeId,
        parents: Vec<NodeId>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidCpd {
            node: dag.name(owner).to_string(),
            reason,
        };
        if !dag.contains(owner) {
            return Err(Error::NodeOutOfRange(owner.index()));
        }
        let mut seen = NodeSet::new();
        for &p in &parents {
            if !dag.contains(p) {
                return Err(Error::NodeOutOfRange(p.index()));
            }
            if p == owner {
                return Err(invalid("a node cannot condition on itself".into()));
            }
            if !seen.insert(p) {
                return Err(invalid(format!("parent `{}` listed twice", dag.name(p))));
            }
        }
        let card = cards[owner.index()];
        let mut strides = vec![0; parents.len()];
        let mut rows = 1usize;
        for (i, p) in parents.iter().enumerate().rev() {
            strides[i] = rows;
            rows = rows
                .checked_mul(cards[p.index()])
                .ok_or_else(|| invalid("table too large".into()))?;
        }
        if table.len() != rows * card {
            return Err(invalid(format!(
                "expected {} entries ({rows} rows of {card}), got {}",
                rows * card,
                table.len()
            )));
        }
        for (r, row) in table.chunks(card).enumerate() {
            if let Some(bad) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(invalid(format!("row {r} has entry {bad} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(invalid(format!("row {r} sums to {sum}")));
            }
        }
        Ok(Cpd {
            owner,
            card,
            parents,
            strides,
            table,
        })
    }

    /// A table whose row for each parent configuration is the point mass on
    /// `choose(config)`.
    pub fn deterministic(
        dag: &Dag,
        cards: &[usize],
        owner: NodeId,
        parents: Vec<NodeId>,
        choose: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let card = cards[owner.index()];
        let pcards: Vec<usize> = parents.iter().map(|p| cards[p.index()]).collect();
        let mut table = Vec::new();
        for config in configurations(&pcards) {
            let value = choose(&config);
            if value >= card {
                return Err(Error::ValueOutOfRange {
                    node: dag.name(owner).to_string(),
                    value,
                    card,
                });
            }
            table.extend((0..card).map(|x| if x == value { 1.0 } else { 0.0 }));
        }
        Cpd::new(dag, cards, owner, parents, table)
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parents
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn rows(&self) -> usize {
        self.table.len() / self.card
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.table[r * self.card..(r + 1) * self.card]
    }

    /// The flat row-major table.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Row selected by a full state vector indexed by node.
    #[inline]
    pub fn row_index(&self, state: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.strides)
            .map(|(p, s)| state[p.index()] * s)
            .sum()
    }

    /// `P(owner = state[owner] | parents)` under a full state vector.
    #[inline]
    pub fn prob(&self, state: &[usize]) -> f64 {
        self.table[self.row_index(state) * self.card + state[self.owner.index()]]
    }

    /// Parent values encoded by row `r`, in parent order.
    pub fn row_config(&self, r: usize, cards: &[usize]) -> Vec<usize> {
        self.parents
            .iter()
            .zip(&self.strides)
            .map(|(p, s)| (r / s) % cards[p.index()])
            .collect()
    }

    /// Whether every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|&p| p == 0.0 || p == 1.0)
    }
}

/// Partial or full assignment of values to nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<NodeId, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: NodeId, value: usize) -> Self {
        self.0.insert(v, value);
        self
    }

    pub fn insert(&mut self, v: NodeId, value: usize) -> Option<usize> {
        self.0.insert(v, value)
    }

    /// Builds an assignment from `(name, value)` pairs.
    pub fn from_names<S: AsRef<str>>(
        dag: &Dag,
        pairs: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self> {
        let mut out = Assignment::new();
        for (name, value) in pairs {
            out.insert(dag.node(name.as_ref())?, value);
        }
        Ok(out)
    }

    pub fn get(&self, v: NodeId) -> Option<usize> {
        self.0.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.0.iter().map(|(&v, &x)| (v, x))
    }

    pub fn nodes(&self) -> NodeSet {
        self.0.keys().copied().collect()
    }

    pub fn fmt_with(&self, dag: &Dag) -> String {
        let parts: Vec<String> = self
            .iter()
            .map(|(v, x)| format!("{}={x}", dag.name(v)))
            .collect();
        parts.join(", ")
    }
}

impl FromIterator<(NodeId, usize)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (NodeId, usize)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// All value combinations for the given cardinalities, last position fastest.
pub fn configurations(cards: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = cards.iter().product();
    let mut current = vec![0; cards.len()];
    let mut first = true;
    (0..total).map(move |_| {
        if !first {
            for i in (0..cards.len()).rev() {
                current[i] += 1;
                if current[i] < cards[i] {
                    break;
                }
                current[i] = 0;
            }
        }
        first = false;
        current.clone()
    })
}

/// Calls `f` on every state that agrees with the fixed entries of `state`.
/// Positions listed in `free` are cycled; everything else stays put.
pub(crate) fn for_each_completion(
    cards: &[usize],
    free: &[usize],
    state: &mut [usize],
    mut f: impl FnMut(&[usize]),
) {
    for &i in free {
        state[i] = 0;
    }
    loop {
        f(state);
        let mut advanced = false;
        for &i in free.iter().rev() {
            state[i] += 1;
            if state[i] < cards[i] {
                advanced = true;
                break;
            }
            state[i] = 0;
        }
        if !advanced {
            return;
        }
    }
}

/// A DAG with cardinalities and one CPD per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Cbn {
    dag: Dag,
    cards: Vec<usize>,
    cpds: Vec<Cpd>,
}

impl Cbn {
    /// Validates and assembles a network. `cpds` may come in any order but
    /// must cover each node exactly once, with parent lists matching the DAG.
    pub fn new(dag: Dag, cards: Vec<usize>, cpds: Vec<Cpd>) -> Result<Self> {
        if cards.len() != dag.len() {
            return Err(Error::InvalidProblem(format!(
                "{} cardinalities for {} nodes",
                cards.len(),
                dag.len()
            )));
        }
        for v in dag.nodes() {
            if cards[v.index()] < 2 {
                return Err(Error::InvalidCardinality {
                    node: dag.name(v).to_string(),
                    card: cards[v.index()],
                });
            }
        }
        let mut slots: Vec<Option<Cpd>> = vec![None; dag.len()];
        for cpd in cpds {
            let v = cpd.owner();
            if !dag.contains(v) {
                return Err(Error::NodeOutOfRange(v.index()));
            }
            let name = dag.name(v).to_string();
            if cpd.card() != cards[v.index()] {
                return Err(Error::InvalidCpd {
                    node: name,
                    reason: format!(
                        "table has {} columns but the node has {} values",
                        cpd.card(),
                        cards[v.index()]
                    ),
                });
            }
            let declared: NodeSet = cpd.parents().iter().copied().collect();
            let actual: NodeSet = dag.parents(v).iter().copied().collect();
            if declared != actual {
                return Err(Error::InvalidCpd {
                    node: name,
                    reason: format!(
                        "parents {} do not match the graph's {}",
                        dag.fmt_set(&declared),
                        dag.fmt_set(&actual)
                    ),
                });
            }
            let rows_expected: usize = cpd.parents().iter().map(|p| cards[p.index()]).product();
            if cpd.rows() != rows_expected {
                return Err(Error::InvalidCpd {
                    node: name,
                    reason: "row count does not match parent cardinalities".into(),
                });
            }
            if slots[v.index()].replace(cpd).is_some() {
                return Err(Error::InvalidCpd {
                    node: name,
                    reason: "more than one CPD supplied".into(),
                });
            }
        }
        let mut out = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            out.push(slot.ok_or_else(|| Error::MissingCpd(dag.names()[i].clone()))?);
        }
        Ok(Cbn {
            dag,
            cards,
            cpds: out,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card(&self, v: NodeId) -> usize {
        self.cards[v.index()]
    }

    pub fn cpd(&self, v: NodeId) -> &Cpd {
        &self.cpds[v.index()]
    }

    pub fn cpds(&self) -> &[Cpd] {
        &self.cpds
    }

    /// Number of joint states, or `None` on overflow.
    pub fn state_space(&self) -> Option<usize> {
        self.cards
            .iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k))
    }

    pub(crate) fn check_assignment(&self, a: &Assignment) -> Result<()> {
        for (v, x) in a.iter() {
            if !self.dag.contains(v) {
                return Err(Error::NodeOutOfRange(v.index()));
            }
            if x >= self.cards[v.index()] {
                return Err(Error::ValueOutOfRange {
                    node: self.dag.name(v).to_string(),
                    value: x,
                    card: self.cards[v.index()],
                });
            }
        }
        Ok(())
    }

    /// Product of CPD entries for a full state vector (indexed by node).
    #[inline]
    pub(crate) fn joint_state(&self, state: &[usize]) -> f64 {
        let mut p = 1.0;
        for cpd in &self.cpds {
            p *= cpd.prob(state);
            if p == 0.0 {
                break;
            }
        }
        p
    }

    /// Probability of a full assignment.
    pub fn joint_prob(&self, full: &Assignment) -> Result<f64> {
        self.check_assignment(full)?;
        let mut state = vec![0; self.dag.len()];
        for v in self.dag.nodes() {
            state[v.index()] = full
                .get(v)
                .ok_or_else(|| Error::MissingAssignment(self.dag.name(v).to_string()))?;
        }
        Ok(self.joint_state(&state))
    }

    /// Probability of a partial assignment, summing the joint over every
    /// completion.
    pub fn marginal_prob(&self, event: &Assignment) -> Result<f64> {
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        self.check_assignment(event)?;
        Ok(self.sum_completions(event))
    }

    pub(crate) fn sum_completions(&self, event: &Assignment) -> f64 {
        let mut state = vec![0; self.dag.len()];
        for (v, x) in event.iter() {
            state[v.index()] = x;
        }
        let free: Vec<usize> = self
            .dag
            .nodes()
            .filter(|v| event.get(*v).is_none())
            .map(NodeId::index)
            .collect();
        let mut total = 0.0;
        for_each_completion(&self.cards, &free, &mut state, |s| {
            total += self.joint_state(s);
        });
        total
    }

    /// `P(event | given)`; conditioning on a probability-zero event is an
    /// error, not zero.
    pub fn conditional_prob(&self, event: &Assignment, given: &Assignment) -> Result<f64> {
        if event.is_empty() || given.is_empty() {
            return Err(Error::EmptyEvent);
        }
        if let Some((v, _)) = event.iter().find(|(v, _)| given.get(*v).is_some()) {
            return Err(Error::OverlappingSets(self.dag.name(v).to_string()));
        }
        let denom = self.marginal_prob(given)?;
        if denom == 0.0 {
            return Err(Error::ZeroProbabilityConditioning);
        }
        let both: Assignment = event.iter().chain(given.iter()).collect();
        Ok(self.marginal_prob(&both)? / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// a -> b with P(a=1)=0.7, P(b=1|a=1)=0.5, P(b=1|a=0)=0.2.
    fn two_chain() -> Cbn {
        let dag = Dag::new(["a", "b"], [("a", "b")]).unwrap();
        let cards = vec![2, 2];
        let a = dag.node("a").unwrap();
        let b = dag.node("b").unwrap();
        let cpds = vec![
            Cpd::new(&dag, &cards, a, vec![], vec![0.3, 0.7]).unwrap(),
            Cpd::new(&dag, &cards, b, vec![a], vec![0.8, 0.2, 0.5, 0.5]).unwrap(),
        ];
        Cbn::new(dag, cards, cpds).unwrap()
    }

    fn at(cbn: &Cbn, pairs: &[(&str, usize)]) -> Assignment {
        Assignment::from_names(cbn.dag(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn joint_probabilities() {
        let cbn = two_chain();
        let p = cbn.joint_prob(&at(&cbn, &[("a", 1), ("b", 1)])).unwrap();
        assert!((p - 0.35).abs() < 1e-12);
        assert!(matches!(
            cbn.joint_prob(&at(&cbn, &[("a", 1)])),
            Err(Error::MissingAssignment(_))
        ));
    }

    #[test]
    fn zero_entry_annihilates() {
        let dag = Dag::new(["a", "b"], [("a", "b")]).unwrap();
        let cards = vec![2, 2];
        let (a, b) = (dag.node("a").unwrap(), dag.node("b").unwrap());
        let cpds = vec![
            Cpd::new(&dag, &cards, a, vec![], vec![0.5, 0.5]).unwrap(),
            Cpd::new(&dag, &cards, b, vec![a], vec![1.0, 0.0, 0.0, 1.0]).unwrap(),
        ];
        let cbn = Cbn::new(dag, cards, cpds).unwrap();
        assert_eq!(
            cbn.joint_prob(&at(&cbn, &[("a", 0), ("b", 1)])).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_uniform_node() {
        let dag = Dag::new(["x"], Vec::<(&str, &str)>::new()).unwrap();
        let x = dag.node("x").unwrap();
        let cards = vec![2];
        let cpd = Cpd::new(&dag, &cards, x, vec![], vec![0.5, 0.5]).unwrap();
        let cbn = Cbn::new(dag, cards, vec![cpd]).unwrap();
        assert_eq!(cbn.joint_prob(&at(&cbn, &[("x", 0)])).unwrap(), 0.5);
    }

    #[test]
    fn marginals_and_conditionals() {
        let cbn = two_chain();
        let b1 = at(&cbn, &[("b", 1)]);
        assert!((cbn.marginal_prob(&b1).unwrap() - 0.41).abs() < 1e-12);
        let p = cbn.conditional_prob(&b1, &at(&cbn, &[("a", 1)])).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(
            cbn.marginal_prob(&Assignment::new()),
            Err(Error::EmptyEvent)
        );
    }

    #[test]
    fn conditioning_on_impossible_event_is_an_error() {
        let dag = Dag::new(["a", "b"], [("a", "b")]).unwrap();
        let cards = vec![2, 2];
        let (a, b) = (dag.node("a").unwrap(), dag.node("b").unwrap());
        let cpds = vec![
            Cpd::new(&dag, &cards, a, vec![], vec![1.0, 0.0]).unwrap(),
            Cpd::new(&dag, &cards, b, vec![a], vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
        ];
        let cbn = Cbn::new(dag, cards, cpds).unwrap();
        assert_eq!(
            cbn.conditional_prob(&at(&cbn, &[("b", 1)]), &at(&cbn, &[("a", 1)])),
            Err(Error::ZeroProbabilityConditioning)
        );
        // b is a deterministic consequence of a = 0.
        let p = cbn
            .conditional_prob(&at(&cbn, &[("b", 1)]), &at(&cbn, &[("a", 0)]))
            .unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn cpd_validation() {
        let dag = Dag::new(["a", "b"], [("a", "b")]).unwrap();
        let cards = vec![2, 3];
        let (a, b) = (dag.node("a").unwrap(), dag.node("b").unwrap());
        assert!(Cpd::new(&dag, &cards, a, vec![], vec![0.5, 0.6]).is_err());
        assert!(Cpd::new(&dag, &cards, a, vec![], vec![1.5, -0.5]).is_err());
        assert!(Cpd::new(&dag, &cards, b, vec![a], vec![0.2, 0.3, 0.5]).is_err());
        assert!(Cpd::new(&dag, &cards, b, vec![a, a], vec![]).is_err());
        let ok = Cpd::new(&dag, &cards, b, vec![a], vec![0.2, 0.3, 0.5, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(ok.rows(), 2);
        assert_eq!(ok.row(1), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn network_validation() {
        let dag = Dag::new(["a", "b"], [("a", "b")]).unwrap();
        let (a, b) = (dag.node("a").unwrap(), dag.node("b").unwrap());
        let cards = vec![2, 2];
        let pa = Cpd::new(&dag, &cards, a, vec![], vec![0.5, 0.5]).unwrap();
        let orphan_b = Cpd::new(&dag, &cards, b, vec![], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            Cbn::new(dag.clone(), cards.clone(), vec![pa.clone(), orphan_b]),
            Err(Error::InvalidCpd { .. })
        ));
        assert!(matches!(
            Cbn::new(dag.clone(), cards.clone(), vec![pa.clone()]),
            Err(Error::MissingCpd(_))
        ));
        assert!(matches!(
            Cbn::new(dag, vec![2, 1], vec![pa]),
            Err(Error::InvalidCardinality { .. })
        ));
    }

    #[test]
    fn parent_order_is_free() {
        let dag = Dag::new(["a", "b", "c"], [("a", "c"), ("b", "c")]).unwrap();
        let cards = vec![2, 3, 2];
        let [a, b, c] = ["a", "b", "c"].map(|n| dag.node(n).unwrap());
        // c = 1 iff a = 1 and b = 2, listed with b first.
        let cpd_c = Cpd::deterministic(&dag, &cards, c, vec![b, a], |pv| {
            usize::from(pv[0] == 2 && pv[1] == 1)
        })
        .unwrap();
        let cbn = Cbn::new(
            dag.clone(),
            cards.clone(),
            vec![
                Cpd::new(&dag, &cards, a, vec![], vec![0.5, 0.5]).unwrap(),
                Cpd::new(&dag, &cards, b, vec![], vec![0.2, 0.3, 0.5]).unwrap(),
                cpd_c,
            ],
        )
        .unwrap();
        let p = cbn.marginal_prob(&at(&cbn, &[("c", 1)])).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn configurations_are_row_major() {
        let all: Vec<Vec<usize>> = configurations(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        assert_eq!(configurations(&[]).count(), 1);
    }
}
