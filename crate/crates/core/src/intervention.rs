//! Intervention policies, intervention pairs and their graphs.
//!
//! A policy replaces the mechanism of one node by a conditional table over a
//! chosen *scope* of that node's original ancestors. Policies are graded into
//! classes by how far up the ancestry their scope may reach: class-0 policies
//! have an empty scope, class-1 policies may read the parents, class-j
//! policies may read every ancestor within j reverse steps, and class-inf
//! policies may read every ancestor.
//!
//! The graph induced by a set of policies (an i-DAG) keeps every original
//! edge except those into intervened nodes ("solid" edges) and adds one
//! "dashed" edge from each scope member into the intervened node. A
//! distinguished clamp node sends a dashed edge into every intervened node,
//! so that the set of dashed edges alone tells which nodes were intervened.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::cbn::{Assignment, Cbn, Cpd};
use crate::error::{Error, Result};
use crate::graph::{Dag, Level, NodeId, NodeSet};

/// Position in the policy hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IpClass(Level);

impl IpClass {
    pub const ATOMIC: IpClass = IpClass(Level::Finite(0));
    pub const PARENTS: IpClass = IpClass(Level::Finite(1));
    pub const INFINITE: IpClass = IpClass(Level::Infinite);

    pub const fn finite(level: usize) -> Self {
        IpClass(Level::Finite(level))
    }

    pub fn level(self) -> Level {
        self.0
    }

    pub fn is_atomic(self) -> bool {
        self == Self::ATOMIC
    }
}

impl PartialOrd for IpClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IpClass {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (Level::Finite(a), Level::Finite(b)) => a.cmp(&b),
            (Level::Finite(_), Level::Infinite) => Ordering::Less,
            (Level::Infinite, Level::Finite(_)) => Ordering::Greater,
            (Level::Infinite, Level::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for IpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class-{}", self.0)
    }
}

impl FromStr for IpClass {
    type Err = String;

    /// Accepts `0`, `3`, `inf`, optionally prefixed by `class-`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let body = s.strip_prefix("class-").unwrap_or(s);
        match body {
            "inf" | "infinity" | "∞" => Ok(IpClass::INFINITE),
            _ => body
                .parse::<usize>()
                .map(IpClass::finite)
                .map_err(|_| format!("`{s}` is not a policy class (expected 0, 1, 2, ... or inf)")),
        }
    }
}

/// The scope a policy of `class` on `v` is allowed to read.
pub fn scope_for_class(dag: &Dag, v: NodeId, class: IpClass) -> Result<NodeSet> {
    dag.ancestors(v, class.level())
}

/// A policy for one intervened node: a table over the node's values for
/// each configuration of its scope.
#[derive(Clone, Debug, PartialEq)]
pub struct InterventionPolicy {
    target: NodeId,
    table: Cpd,
}

impl InterventionPolicy {
    /// Validates a policy against the original graph: the target may not be
    /// in its own scope and the scope must consist of original ancestors.
    pub fn new(
        dag: &Dag,
        cards: &[usize],
        target: NodeId,
        scope: Vec<NodeId>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPolicy {
            node: dag.name(target).to_string(),
            reason,
        };
        if !dag.contains(target) {
            return Err(Error::NodeOutOfRange(target.index()));
        }
        if scope.contains(&target) {
            return Err(invalid("the target cannot be in its own scope".into()));
        }
        let ancestors = dag.ancestors(target, Level::Infinite)?;
        if let Some(&bad) = scope.iter().find(|s| !ancestors.contains(s)) {
            return Err(invalid(format!(
                "scope member `{}` is not an ancestor",
                dag.name(bad)
            )));
        }
        let table = Cpd::new(dag, cards, target, scope, table)?;
        Ok(InterventionPolicy { target, table })
    }

    /// Forces `target` to `value`, reading nothing.
    pub fn atomic(dag: &Dag, cards: &[usize], target: NodeId, value: usize) -> Result<Self> {
        if !dag.contains(target) {
            return Err(Error::NodeOutOfRange(target.index()));
        }
        let card = cards[target.index()];
        if value >= card {
            return Err(Error::ValueOutOfRange {
                node: dag.name(target).to_string(),
                value,
                card,
            });
        }
        let row = (0..card)
            .map(|x| if x == value { 1.0 } else { 0.0 })
            .collect();
        Self::new(dag, cards, target, Vec::new(), row)
    }

    /// Deterministic policy: `choices[r]` is the value forced under scope
    /// configuration `r` (row-major over `scope`).
    pub fn deterministic(
        dag: &Dag,
        cards: &[usize],
        target: NodeId,
        scope: Vec<NodeId>,
        choices: &[usize],
    ) -> Result<Self> {
        let card = cards[target.index()];
        let mut table = Vec::with_capacity(choices.len() * card);
        for &c in choices {
            if c >= card {
                return Err(Error::ValueOutOfRange {
                    node: dag.name(target).to_string(),
                    value: c,
                    card,
                });
            }
            table.extend((0..card).map(|x| if x == c { 1.0 } else { 0.0 }));
        }
        Self::new(dag, cards, target, scope, table)
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn scope(&self) -> &[NodeId] {
        self.table.parents()
    }

    pub fn table(&self) -> &Cpd {
        &self.table
    }

    /// For a deterministic policy, the forced value per row.
    pub fn choices(&self) -> Option<Vec<usize>> {
        if !self.table.is_deterministic() {
            return None;
        }
        Some(
            (0..self.table.rows())
                .map(|r| {
                    self.table
                        .row(r)
                        .iter()
                        .position(|&p| p == 1.0)
                        .unwrap_or(0)
                })
                .collect(),
        )
    }

    /// Renders the policy as `ip(y | x) = ...` for reports.
    pub fn describe(&self, dag: &Dag, cards: &[usize]) -> String {
        let name = dag.name(self.target);
        let scope: Vec<&str> = self.scope().iter().map(|&s| dag.name(s)).collect();
        let head = if scope.is_empty() {
            format!("ip({name})")
        } else {
            format!("ip({name} | {})", scope.join(", "))
        };
        let mut rows = Vec::new();
        for r in 0..self.table.rows() {
            let cfg = self.table.row_config(r, cards);
            let cond: Vec<String> = self
                .scope()
                .iter()
                .zip(&cfg)
                .map(|(&s, x)| format!("{}={x}", dag.name(s)))
                .collect();
            let body = match self.table.row(r).iter().position(|&p| p == 1.0) {
                Some(x) if self.table.row(r).iter().filter(|&&p| p != 0.0).count() == 1 => {
                    format!("{name}={x}")
                }
                _ => {
                    let ps: Vec<String> = self
                        .table
                        .row(r)
                        .iter()
                        .map(|p| format!("{p:.9}"))
                        .collect();
                    format!("[{}]", ps.join(" "))
                }
            };
            if cond.is_empty() {
                rows.push(body);
            } else {
                rows.push(format!("{} -> {body}", cond.join(",")));
            }
        }
        format!("{head}: {}", rows.join("; "))
    }
}

/// `atomic_policy(v, value)`: the point-mass policy on `value`.
pub fn atomic_policy(
    dag: &Dag,
    cards: &[usize],
    v: NodeId,
    value: usize,
) -> Result<InterventionPolicy> {
    InterventionPolicy::atomic(dag, cards, v, value)
}

/// Smallest class whose scope contains the policy's scope.
pub fn classify_policy(dag: &Dag, policy: &InterventionPolicy) -> Result<IpClass> {
    let target = policy.target();
    if policy.scope().is_empty() {
        return Ok(IpClass::ATOMIC);
    }
    // Breadth-first distances up the parent links.
    let mut depth: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut frontier = vec![target];
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for u in frontier {
            for &p in dag.parents(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(p) {
                    e.insert(level);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    let mut needed = 0;
    for s in policy.scope() {
        match depth.get(s) {
            Some(&d) => needed = needed.max(d),
            None => {
                return Err(Error::InvalidPolicy {
                    node: dag.name(target).to_string(),
                    reason: format!("scope member `{}` is not an ancestor", dag.name(*s)),
                })
            }
        }
    }
    Ok(IpClass::finite(needed))
}

/// A set of intervened nodes with their policies. The empty pair means no
/// intervention.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InterventionPair {
    policies: BTreeMap<NodeId, InterventionPolicy>,
}

impl InterventionPair {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Adds a policy, replacing any previous one on the same target.
    pub fn insert(&mut self, policy: InterventionPolicy) -> Option<InterventionPolicy> {
        self.policies.insert(policy.target(), policy)
    }

    pub fn with(mut self, policy: InterventionPolicy) -> Self {
        self.insert(policy);
        self
    }

    pub fn get(&self, v: NodeId) -> Option<&InterventionPolicy> {
        self.policies.get(&v)
    }

    pub fn targets(&self) -> NodeSet {
        self.policies.keys().copied().collect()
    }

    pub fn policies(&self) -> impl Iterator<Item = &InterventionPolicy> {
        self.policies.values()
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    /// One [`InterventionPolicy::describe`] line per policy, or `none`.
    pub fn describe(&self, dag: &Dag, cards: &[usize]) -> String {
        if self.is_empty() {
            return "none".into();
        }
        self.policies()
            .map(|p| p.describe(dag, cards))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl FromIterator<InterventionPolicy> for InterventionPair {
    fn from_iter<T: IntoIterator<Item = InterventionPolicy>>(iter: T) -> Self {
        let mut pair = InterventionPair::empty();
        for p in iter {
            pair.insert(p);
        }
        pair
    }
}

/// Endpoint of an i-DAG edge: the clamp node or an original node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdagNode {
    Clamp,
    Node(NodeId),
}

/// Graph induced by an intervention pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IDag {
    base: Dag,
    solid: BTreeSet<(NodeId, NodeId)>,
    dashed: BTreeSet<(IdagNode, NodeId)>,
}

impl IDag {
    pub fn base(&self) -> &Dag {
        &self.base
    }

    pub fn solid_edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.solid
    }

    pub fn dashed_edges(&self) -> &BTreeSet<(IdagNode, NodeId)> {
        &self.dashed
    }

    /// Every edge regardless of style.
    pub fn edges(&self) -> BTreeSet<(IdagNode, NodeId)> {
        self.solid
            .iter()
            .map(|&(a, b)| (IdagNode::Node(a), b))
            .chain(self.dashed.iter().copied())
            .collect()
    }

    /// Nodes receiving a dashed edge.
    pub fn intervened(&self) -> NodeSet {
        self.dashed.iter().map(|&(_, b)| b).collect()
    }

    /// Edges present here but not in `other`.
    pub fn surplus(&self, other: &IDag) -> BTreeSet<(IdagNode, NodeId)> {
        self.edges().difference(&other.edges()).copied().collect()
    }
}

fn check_policy(dag: &Dag, cards: &[usize], policy: &InterventionPolicy) -> Result<()> {
    // Re-validating through the constructor catches policies built against a
    // different graph or different cardinalities.
    InterventionPolicy::new(
        dag,
        cards,
        policy.target(),
        policy.scope().to_vec(),
        policy.table().table().to_vec(),
    )
    .map(|_| ())
}

/// Builds the i-DAG for `pair` over `dag`.
pub fn build_idag(dag: &Dag, pair: &InterventionPair) -> Result<IDag> {
    let intervened = pair.targets();
    for p in pair.policies() {
        if !dag.contains(p.target()) {
            return Err(Error::NodeOutOfRange(p.target().index()));
        }
        let anc = dag.ancestors(p.target(), Level::Infinite)?;
        if let Some(&bad) = p.scope().iter().find(|s| !anc.contains(s)) {
            return Err(Error::InvalidPolicy {
                node: dag.name(p.target()).to_string(),
                reason: format!("scope member `{}` is not an ancestor", dag.name(bad)),
            });
        }
    }
    let solid: BTreeSet<(NodeId, NodeId)> = dag
        .edges()
        .iter()
        .copied()
        .filter(|(_, b)| !intervened.contains(b))
        .collect();
    let mut dashed = BTreeSet::new();
    for p in pair.policies() {
        dashed.insert((IdagNode::Clamp, p.target()));
        for &s in p.scope() {
            dashed.insert((IdagNode::Node(s), p.target()));
        }
    }
    let idag = IDag {
        base: dag.clone(),
        solid,
        dashed,
    };
    // Scopes are original ancestors, so this cannot fail for valid policies.
    let plain: Vec<(usize, usize)> = idag
        .edges()
        .into_iter()
        .filter_map(|(a, b)| match a {
            IdagNode::Node(a) => Some((a.index(), b.index())),
            IdagNode::Clamp => None,
        })
        .collect();
    Dag::from_indices(dag.names().to_vec(), &plain)?;
    Ok(idag)
}

/// Plain subsumption: same node names and every edge of `g2` present in `g1`.
pub fn subsumes(g1: &Dag, g2: &Dag) -> bool {
    let nodes1: BTreeSet<&str> = g1.names().iter().map(String::as_str).collect();
    let nodes2: BTreeSet<&str> = g2.names().iter().map(String::as_str).collect();
    nodes1 == nodes2 && named_edges(g2).is_subset(&named_edges(g1))
}

/// Edges of `g1` missing from `g2`, by name.
pub fn surplus(g1: &Dag, g2: &Dag) -> BTreeSet<(String, String)> {
    named_edges(g1)
        .difference(&named_edges(g2))
        .cloned()
        .collect()
}

fn named_edges(g: &Dag) -> BTreeSet<(String, String)> {
    g.edges()
        .iter()
        .map(|&(a, b)| (g.name(a).to_string(), g.name(b).to_string()))
        .collect()
}

/// i-subsumption: `id1` contains every edge of `id2`, every dashed edge of
/// `id2` is dashed in `id1`, and whatever `id1` has in surplus is dashed.
pub fn i_subsumes(id1: &IDag, id2: &IDag) -> Result<bool> {
    if id1.base != id2.base {
        return Err(Error::BaseMismatch);
    }
    let e1 = id1.edges();
    let e2 = id2.edges();
    let contains = e2.is_subset(&e1);
    let dashed = id2.dashed.is_subset(&id1.dashed);
    let surplus_dashed = e1.difference(&e2).all(|e| id1.dashed.contains(e));
    Ok(contains && dashed && surplus_dashed)
}

/// Replaces the mechanism of every intervened node by its policy table. The
/// result lives on the mutilated graph with scope edges added.
pub fn apply_intervention(cbn: &Cbn, pair: &InterventionPair) -> Result<Cbn> {
    if pair.is_empty() {
        return Ok(cbn.clone());
    }
    let dag = cbn.dag();
    let cards = cbn.cards();
    for p in pair.policies() {
        check_policy(dag, cards, p)?;
    }
    let intervened = pair.targets();
    let mut edges: Vec<(usize, usize)> = dag
        .edges()
        .iter()
        .filter(|(_, b)| !intervened.contains(b))
        .map(|&(a, b)| (a.index(), b.index()))
        .collect();
    for p in pair.policies() {
        edges.extend(p.scope().iter().map(|s| (s.index(), p.target().index())));
    }
    let new_dag = Dag::from_indices(dag.names().to_vec(), &edges)?;
    let mut cpds = Vec::with_capacity(dag.len());
    for v in dag.nodes() {
        let cpd = match pair.get(v) {
            Some(p) => Cpd::new(
                &new_dag,
                cards,
                v,
                p.scope().to_vec(),
                p.table().table().to_vec(),
            )?,
            None => Cpd::new(
                &new_dag,
                cards,
                v,
                cbn.cpd(v).parents().to_vec(),
                cbn.cpd(v).table().to_vec(),
            )?,
        };
        cpds.push(cpd);
    }
    Cbn::new(new_dag, cards.to_vec(), cpds)
}

/// `P(event | do[pair])`.
pub fn interventional_prob(cbn: &Cbn, pair: &InterventionPair, event: &Assignment) -> Result<f64> {
    apply_intervention(cbn, pair)?.marginal_prob(event)
}
