//! Directed acyclic graphs over named nodes and the structural queries the
//! rest of the crate is built on: ancestry up to a given level, descendants,
//! backward chaining with a stop set, and d-separation.
//!
//! Node handles are dense indices in insertion order. Every set-valued result
//! is a [`NodeSet`], which iterates in that same order, so anything printed
//! from these sets is reproducible.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Handle to a node of a [`Dag`]; the wrapped value is the insertion index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Ordered node set. Ordering is by insertion index.
pub type NodeSet = BTreeSet<NodeId>;

/// How far up the ancestry to look: a fixed number of reverse steps, or all
/// the way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Finite(usize),
    Infinite,
}

impl Level {
    fn admits(self, depth: usize) -> bool {
        match self {
            Level::Finite(max) => depth <= max,
            Level::Infinite => true,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => f.write_str("inf"),
        }
    }
}

/// A directed acyclic graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    topo: Vec<NodeId>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edge_set() == other.edge_set()
    }
}

impl Eq for Dag {}

impl Dag {
    /// Builds a DAG from node names and `(parent, child)` name pairs.
    ///
    /// Rejects empty or duplicate names, edges to unknown nodes, self-loops,
    /// duplicate edges and directed cycles.
    pub fn new<N, I, E, A, B>(nodes: I, edges: E) -> Result<Self>
    where
        N: Into<String>,
        I: IntoIterator<Item = N>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let names: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if index.insert(name.clone(), NodeId(i)).is_some() {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownNode(n.to_string()))
        };
        let mut pairs = Vec::new();
        for (a, b) in edges {
            pairs.push((lookup(a.as_ref())?.0, lookup(b.as_ref())?.0));
        }
        Self::build(names, index, pairs)
    }

    /// Builds a DAG from node names and index pairs.
    pub fn from_indices(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if index.insert(name.clone(), NodeId(i)).is_some() {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= names.len() {
                    return Err(Error::NodeOutOfRange(x));
                }
            }
        }
        Self::build(names, index, edges.to_vec())
    }

    fn build(
        names: Vec<String>,
        index: HashMap<String, NodeId>,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            if a == b {
                return Err(Error::SelfLoop(names[a].clone()));
            }
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge(names[a].clone(), names[b].clone()));
            }
            parents[b].push(NodeId(a));
            children[a].push(NodeId(b));
            edges.push((NodeId(a), NodeId(b)));
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }

        // Kahn's algorithm; the smallest ready index goes first.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            topo.push(NodeId(i));
            for c in &children[i] {
                indegree[c.0] -= 1;
                if indegree[c.0] == 0 {
                    ready.insert(c.0);
                }
            }
        }
        if topo.len() != n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(Error::Cycle(names[stuck].clone()));
        }

        Ok(Dag {
            names,
            index,
            parents,
            children,
            edges,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// All node handles in insertion order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(NodeId)
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Resolves several names at once into a [`NodeSet`].
    pub fn node_set<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<NodeSet> {
        names.into_iter().map(|n| self.node(n.as_ref())).collect()
    }

    /// Validates a raw index.
    pub fn node_at(&self, index: usize) -> Result<NodeId> {
        if index < self.names.len() {
            Ok(NodeId(index))
        } else {
            Err(Error::NodeOutOfRange(index))
        }
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Parents of `v`, sorted by index.
    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.0]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.0]
    }

    /// Edges in the order they were supplied.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_set(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.edges.iter().copied().collect()
    }

    pub fn has_edge(&self, parent: NodeId, child: NodeId) -> bool {
        self.parents[child.0].binary_search(&parent).is_ok()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.names.len()
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(v.0))
        }
    }

    /// Formats a node set as `{a, b}`.
    pub fn fmt_set<'a>(&self, set: impl IntoIterator<Item = &'a NodeId>) -> String {
        let names: Vec<&str> = set.into_iter().map(|&v| self.name(v)).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Topological order; among ready nodes the earliest inserted goes first.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    /// Ancestors of `v` reachable within `level` reverse steps (`v` excluded).
    pub fn ancestors(&self, v: NodeId, level: Level) -> Result<NodeSet> {
        self.check(v)?;
        let mut out = NodeSet::new();
        let mut queue = VecDeque::from([(v, 0usize)]);
        while let Some((u, depth)) = queue.pop_front() {
            if !level.admits(depth + 1) {
                continue;
            }
            for &p in &self.parents[u.0] {
                if out.insert(p) {
                    queue.push_back((p, depth + 1));
                }
            }
        }
        Ok(out)
    }

    pub fn descendants(&self, v: NodeId) -> Result<NodeSet> {
        self.check(v)?;
        let mut out = NodeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &self.children[u.0] {
                if out.insert(c) {
                    stack.push(c);
                }
            }
        }
        Ok(out)
    }

    /// `set` together with all ancestors of its members.
    pub fn ancestral_closure(&self, set: &NodeSet) -> Result<NodeSet> {
        let mut out = set.clone();
        let mut stack: Vec<NodeId> = set.iter().copied().collect();
        while let Some(u) = stack.pop() {
            self.check(u)?;
            for &p in &self.parents[u.0] {
                if out.insert(p) {
                    stack.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Walks parent links from `start`, stopping at members of `stop`.
    ///
    /// Stop nodes are visited and recorded as terminals but their parents are
    /// not explored. A start node that is also a stop node terminates at
    /// once. Parentless nodes end their path without becoming terminals.
    pub fn backward_chain(&self, start: &NodeSet, stop: &NodeSet) -> Result<BackwardChain> {
        for &v in start.iter().chain(stop) {
            self.check(v)?;
        }
        let mut visited = NodeSet::new();
        let mut terminals = NodeSet::new();
        let mut queue = VecDeque::new();
        for &s in start {
            visited.insert(s);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            if stop.contains(&u) {
                terminals.insert(u);
                continue;
            }
            for &p in &self.parents[u.0] {
                if visited.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        Ok(BackwardChain { visited, terminals })
    }

    /// Whether `a` and `b` are d-separated given `z`.
    ///
    /// Uses the reachable-trail search over `(node, direction)` states: a
    /// trail may pass a collider only if the collider has a descendant in
    /// `z`, and may pass any other node only if that node is not in `z`.
    pub fn d_separated(&self, a: &NodeSet, b: &NodeSet, z: &NodeSet) -> Result<bool> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in a.iter().chain(b).chain(z) {
            self.check(v)?;
        }
        for &v in a {
            if b.contains(&v) || z.contains(&v) {
                return Err(Error::OverlappingSets(self.name(v).to_string()));
            }
        }
        if let Some(&v) = b.iter().find(|v| z.contains(v)) {
            return Err(Error::OverlappingSets(self.name(v).to_string()));
        }
        let reachable = self.reachable(a, z);
        Ok(b.iter().all(|v| !reachable.contains(v)))
    }

    /// Nodes connected to `source` by an active trail given `z`.
    fn reachable(&self, source: &NodeSet, z: &NodeSet) -> NodeSet {
        // Colliders are open exactly when they are in z or have a descendant
        // in z, i.e. when they belong to the ancestral closure of z.
        let open_colliders = self.ancestral_closure(z).expect("z validated by caller");

        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Dir {
            // arrived from a child, travelling towards parents
            Up,
            // arrived from a parent, travelling towards children
            Down,
        }

        let mut seen = BTreeSet::new();
        let mut out = NodeSet::new();
        let mut queue: VecDeque<(NodeId, Dir)> = source.iter().map(|&v| (v, Dir::Up)).collect();
        while let Some((v, dir)) = queue.pop_front() {
            if !seen.insert((v, dir)) {
                continue;
            }
            let in_z = z.contains(&v);
            if !in_z {
                out.insert(v);
            }
            match dir {
                Dir::Up if !in_z => {
                    for &p in &self.parents[v.0] {
                        queue.push_back((p, Dir::Up));
                    }
                    for &c in &self.children[v.0] {
                        queue.push_back((c, Dir::Down));
                    }
                }
                Dir::Up => {}
                Dir::Down => {
                    if !in_z {
                        for &c in &self.children[v.0] {
                            queue.push_back((c, Dir::Down));
                        }
                    }
                    if open_colliders.contains(&v) {
                        for &p in &self.parents[v.0] {
                            queue.push_back((p, Dir::Up));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Result of [`Dag::backward_chain`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardChain {
    /// Every node reached, stop nodes included.
    pub visited: NodeSet,
    /// Reached members of the stop set.
    pub terminals: NodeSet,
}
