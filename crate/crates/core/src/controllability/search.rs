//! Exact optimization of an interventional probability over every policy of
//! a given class on a fixed set of intervened nodes.
//!
//! The objective is affine in each policy row when everything else is held
//! fixed, so some deterministic policy attains the optimum. The search
//! therefore ranges over deterministic policies only, one table row at a
//! time, in lexicographic order (drivers by node order, rows by scope
//! configuration, values ascending).
//!
//! Branch and bound uses a relaxation in which each undecided row is chosen
//! with knowledge of every variable preceding the intervened node in a fixed
//! topological order. Such a relaxation has perfect recall and is solved
//! exactly by a single backward sweep over the joint state space: chance
//! nodes average the value-to-go, decision nodes take the best admissible
//! value. Once every row is fixed the sweep returns the exact objective.

use crate::cbn::{Assignment, Cbn};
use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};
use crate::intervention::{
    interventional_prob, scope_for_class, InterventionPair, InterventionPolicy, IpClass,
};

use super::Budget;

/// Which way the objective is pushed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    #[inline]
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    }

    fn worst(self) -> f64 {
        match self {
            Direction::Max => f64::NEG_INFINITY,
            Direction::Min => f64::INFINITY,
        }
    }
}

/// Optimal value with a deterministic witness policy.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyOptimum {
    pub value: f64,
    pub witness: InterventionPair,
    /// Number of relaxation sweeps the search performed.
    pub sweeps: u64,
}

const TIE: f64 = 1e-12;

enum Slot {
    Chance {
        parents: Vec<usize>,
        strides: Vec<usize>,
        table: Vec<f64>,
    },
    Decision {
        index: usize,
        scope: Vec<usize>,
        strides: Vec<usize>,
    },
}

/// The relevant part of the network, laid out along a topological order.
struct Model {
    cards: Vec<usize>,
    slots: Vec<Slot>,
    desired: Vec<Option<usize>>,
    prefix: Vec<usize>,
}

impl Model {
    /// Sweeps backwards over the state space. `fixed[d][r]` pins row `r` of
    /// decision `d`; free rows take the best value for each prefix.
    fn sweep(&self, fixed: &[Vec<Option<usize>>], dir: Direction, buf: &mut Buffers) -> f64 {
        let n = self.slots.len();
        let total = self.prefix[n];
        let digits = &mut buf.digits;
        digits.clear();
        digits.resize(n, 0);

        let next = &mut buf.next;
        next.clear();
        next.resize(total, 0.0);
        for slot in next.iter_mut() {
            let hit = self
                .desired
                .iter()
                .zip(digits.iter())
                .all(|(want, &have)| want.is_none_or(|w| w == have));
            *slot = if hit { 1.0 } else { 0.0 };
            advance(digits, &self.cards, n);
        }

        let cur = &mut buf.cur;
        for i in (0..n).rev() {
            let card = self.cards[i];
            cur.clear();
            cur.resize(self.prefix[i], 0.0);
            digits[..i].fill(0);
            for (p, out) in cur.iter_mut().enumerate() {
                let base = p * card;
                *out = match &self.slots[i] {
                    Slot::Chance {
                        parents,
                        strides,
                        table,
                    } => {
                        let row: usize = parents
                            .iter()
                            .zip(strides)
                            .map(|(&q, &s)| digits[q] * s)
                            .sum();
                        let probs = &table[row * card..(row + 1) * card];
                        probs
                            .iter()
                            .zip(&next[base..base + card])
                            .map(|(pr, v)| pr * v)
                            .sum()
                    }
                    Slot::Decision {
                        index,
                        scope,
                        strides,
                    } => {
                        let row: usize = scope
                            .iter()
                            .zip(strides)
                            .map(|(&q, &s)| digits[q] * s)
                            .sum();
                        match fixed[*index][row] {
                            Some(x) => next[base + x],
                            None => next[base..base + card].iter().copied().fold(
                                dir.worst(),
                                |acc, v| if dir.better(v, acc) { v } else { acc },
                            ),
                        }
                    }
                };
                advance(digits, &self.cards, i);
            }
            std::mem::swap(cur, next);
        }
        next[0]
    }
}

#[inline]
fn advance(digits: &mut [usize], cards: &[usize], len: usize) {
    for k in (0..len).rev() {
        digits[k] += 1;
        if digits[k] < cards[k] {
            return;
        }
        digits[k] = 0;
    }
}

#[derive(Default)]
struct Buffers {
    digits: Vec<usize>,
    next: Vec<f64>,
    cur: Vec<f64>,
}

struct Decision {
    node: NodeId,
    scope: Vec<NodeId>,
    rows: usize,
    card: usize,
}

struct Search<'m> {
    model: &'m Model,
    dir: Direction,
    cells: Vec<(usize, usize)>,
    cards: Vec<usize>,
    fixed: Vec<Vec<Option<usize>>>,
    best: Option<(f64, Vec<Vec<Option<usize>>>)>,
    found_in_order: bool,
    sweeps: u64,
    max_sweeps: u64,
    buf: Buffers,
}

impl Search<'_> {
    fn bound(&mut self) -> Result<f64> {
        self.sweeps += 1;
        if self.sweeps > self.max_sweeps {
            return Err(Error::BudgetExceeded {
                what: "policy search",
                required: format!("more than {} sweeps", self.max_sweeps),
                limit: self.max_sweeps.to_string(),
            });
        }
        Ok(self.model.sweep(&self.fixed, self.dir, &mut self.buf))
    }

    /// Whether a subtree with relaxation value `b` can still matter.
    fn promising(&self, b: f64) -> bool {
        let Some((inc, _)) = &self.best else {
            return true;
        };
        let gain = match self.dir {
            Direction::Max => b - inc,
            Direction::Min => inc - b,
        };
        if self.found_in_order {
            gain > TIE
        } else {
            gain >= -TIE
        }
    }

    fn offer(&mut self, value: f64) {
        let replace = match &self.best {
            None => true,
            Some((inc, _)) => {
                let gain = match self.dir {
                    Direction::Max => value - inc,
                    Direction::Min => inc - value,
                };
                gain > TIE || (!self.found_in_order && gain >= -TIE)
            }
        };
        if replace {
            self.best = Some((value, self.fixed.clone()));
            self.found_in_order = true;
        }
    }

    /// Fixes each row to the value with the best relaxation, left to right.
    fn greedy(&mut self) -> Result<()> {
        for k in 0..self.cells.len() {
            let (d, r) = self.cells[k];
            let mut pick = (0, self.dir.worst());
            for x in 0..self.cards[d] {
                self.fixed[d][r] = Some(x);
                let b = self.bound()?;
                if self.dir.better(b, pick.1) {
                    pick = (x, b);
                }
            }
            self.fixed[d][r] = Some(pick.0);
        }
        let value = self.bound()?;
        self.best = Some((value, self.fixed.clone()));
        self.found_in_order = false;
        for d in &mut self.fixed {
            d.fill(None);
        }
        Ok(())
    }

    fn descend(&mut self, k: usize) -> Result<()> {
        let (d, r) = self.cells[k];
        for x in 0..self.cards[d] {
            self.fixed[d][r] = Some(x);
            let b = self.bound()?;
            if k + 1 == self.cells.len() {
                self.offer(b);
            } else if self.promising(b) {
                self.descend(k + 1)?;
            }
        }
        self.fixed[d][r] = None;
        Ok(())
    }
}

/// Optimizes `P(desired | do[drivers; ip])` over every `class` policy `ip`.
///
/// The witness is deterministic and, among optimal deterministic policies,
/// the lexicographically smallest (up to a 1e-12 tie tolerance). Drivers
/// that cannot influence the targets get the all-zero policy.
pub fn optimal_policy_value(
    cbn: &Cbn,
    drivers: &NodeSet,
    class: IpClass,
    desired: &Assignment,
    direction: Direction,
    budget: &Budget,
) -> Result<PolicyOptimum> {
    let dag = cbn.dag();
    if desired.is_empty() {
        return Err(Error::EmptyEvent);
    }
    cbn.check_assignment(desired)?;
    for &d in drivers {
        if !dag.contains(d) {
            return Err(Error::NodeOutOfRange(d.index()));
        }
    }

    let relevant = dag.ancestral_closure(&desired.nodes())?;
    let states = relevant
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(cbn.card(*v)))
        .filter(|&s| s <= budget.max_states);
    if states.is_none() {
        return Err(Error::BudgetExceeded {
            what: "joint state space",
            required: format!(
                "{:.0} states",
                relevant
                    .iter()
                    .map(|v| cbn.card(*v) as f64)
                    .product::<f64>()
            ),
            limit: budget.max_states.to_string(),
        });
    }

    let mut decisions = Vec::new();
    let mut inert = Vec::new();
    for &d in drivers {
        let scope: Vec<NodeId> = scope_for_class(dag, d, class)?.into_iter().collect();
        let rows = scope.iter().map(|s| cbn.card(*s)).product();
        let info = Decision {
            node: d,
            scope,
            rows,
            card: cbn.card(d),
        };
        if relevant.contains(&d) {
            decisions.push(info);
        } else {
            inert.push(info);
        }
    }

    let order: Vec<NodeId> = dag
        .topological_order()
        .iter()
        .copied()
        .filter(|v| relevant.contains(v))
        .collect();
    let mut position = vec![usize::MAX; dag.len()];
    for (i, v) in order.iter().enumerate() {
        position[v.index()] = i;
    }
    let cards: Vec<usize> = order.iter().map(|&v| cbn.card(v)).collect();
    let mut prefix = vec![1usize; order.len() + 1];
    for i in 0..order.len() {
        prefix[i + 1] = prefix[i] * cards[i];
    }
    let slots = order
        .iter()
        .map(|&v| match decisions.iter().position(|d| d.node == v) {
            Some(index) => {
                let d = &decisions[index];
                Slot::Decision {
                    index,
                    scope: d.scope.iter().map(|s| position[s.index()]).collect(),
                    strides: row_strides(&d.scope, cbn),
                }
            }
            None => {
                let cpd = cbn.cpd(v);
                Slot::Chance {
                    parents: cpd.parents().iter().map(|p| position[p.index()]).collect(),
                    strides: row_strides(cpd.parents(), cbn),
                    table: cpd.table().to_vec(),
                }
            }
        })
        .collect();
    let model = Model {
        desired: order.iter().map(|&v| desired.get(v)).collect(),
        cards,
        slots,
        prefix,
    };

    let cells: Vec<(usize, usize)> = decisions
        .iter()
        .enumerate()
        .flat_map(|(i, d)| (0..d.rows).map(move |r| (i, r)))
        .collect();
    let mut search = Search {
        model: &model,
        dir: direction,
        cells,
        cards: decisions.iter().map(|d| d.card).collect(),
        fixed: decisions.iter().map(|d| vec![None; d.rows]).collect(),
        best: None,
        found_in_order: false,
        sweeps: 0,
        max_sweeps: budget.max_sweeps,
        buf: Buffers::default(),
    };
    if search.cells.is_empty() {
        let v = search.bound()?;
        search.best = Some((v, Vec::new()));
    } else {
        search.greedy()?;
        search.descend(0)?;
    }
    let sweeps = search.sweeps;
    let (_, choice) = search.best.expect("search always records a leaf");

    let mut witness = InterventionPair::empty();
    for (d, rows) in decisions.iter().zip(&choice) {
        let values: Vec<usize> = rows.iter().map(|x| x.unwrap_or(0)).collect();
        witness.insert(InterventionPolicy::deterministic(
            dag,
            cbn.cards(),
            d.node,
            d.scope.clone(),
            &values,
        )?);
    }
    for d in &inert {
        witness.insert(InterventionPolicy::deterministic(
            dag,
            cbn.cards(),
            d.node,
            d.scope.clone(),
            &vec![0; d.rows],
        )?);
    }
    let value = interventional_prob(cbn, &witness, desired)?;
    Ok(PolicyOptimum {
        value,
        witness,
        sweeps,
    })
}

fn row_strides(vars: &[NodeId], cbn: &Cbn) -> Vec<usize> {
    let mut strides = vec![0; vars.len()];
    let mut acc = 1;
    for (i, v) in vars.iter().enumerate().rev() {
        strides[i] = acc;
        acc *= cbn.card(*v);
    }
    strides
}
