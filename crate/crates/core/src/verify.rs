//! Exhaustive checks of the controllability guarantees on one instance.
//!
//! Each suite returns a list of [`Check`]s; a failing check carries the
//! offending subset and policy in its detail text. Values are compared with a
//! 1e-9 tolerance except for the adversarial-construction suite, which
//! demands exact 0 and 1.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::cbn::{Assignment, Cbn};
use crate::controllability::{
    c_star, optimal_policy_value, solve, usm_adversarial_cbn, Budget, ControlProblem, Direction,
    Objective, PolicyOptimum,
};
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeSet};
use crate::intervention::{
    interventional_prob, scope_for_class, InterventionPair, InterventionPolicy, IpClass,
};

pub const TOLERANCE: f64 = 1e-9;

/// Step of the stochastic-policy grid.
pub const GRID_STEP: f64 = 0.25;
const GRID_TICKS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// Baseline bracketing: min-policy <= P(O) <= max-policy.
    Lemma3,
    /// Backward-chaining drivers match the best subset of the intervenable set.
    Sufficiency,
    /// Adversarial parametrization defeats every proper subset of the drivers.
    Usm,
    /// Stochastic policies on a grid never beat the deterministic optimum.
    Extremality,
    /// Closed-form answers for min-max, max-min and min-min.
    Minimax,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma3,
        Suite::Sufficiency,
        Suite::Usm,
        Suite::Extremality,
        Suite::Minimax,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemma3 => "lemma3",
            Suite::Sufficiency => "sufficiency",
            Suite::Usm => "usm",
            Suite::Extremality => "extremality",
            Suite::Minimax => "minimax",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn p9(x: f64) -> String {
    format!("{x:.9}")
}

/// Every subset of `set`, by increasing bitmask over its sorted members.
pub fn subsets(set: &NodeSet) -> Vec<NodeSet> {
    let members: Vec<NodeId> = set.iter().copied().collect();
    (0u64..1 << members.len())
        .map(|mask| {
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Runs suites against one problem, caching policy optima across them.
pub struct Verifier<'a> {
    problem: &'a ControlProblem,
    cbn: Option<&'a Cbn>,
    budget: Budget,
    cache: HashMap<(NodeSet, IpClass, Direction), PolicyOptimum>,
}

impl<'a> Verifier<'a> {
    /// `cbn` may be omitted for the suites that only need structure.
    pub fn new(problem: &'a ControlProblem, cbn: Option<&'a Cbn>, budget: Budget) -> Result<Self> {
        if let Some(cbn) = cbn {
            if cbn.dag() != problem.dag() {
                return Err(Error::InvalidProblem(
                    "the parametrization does not match the problem's graph".into(),
                ));
            }
        }
        Ok(Verifier {
            problem,
            cbn,
            budget,
            cache: HashMap::new(),
        })
    }

    pub fn run(&mut self, suite: Suite) -> Result<Vec<Check>> {
        match suite {
            Suite::Lemma3 => {
                self.lemma3(&[IpClass::finite(1), IpClass::finite(2), IpClass::INFINITE])
            }
            Suite::Sufficiency => self.sufficiency(),
            Suite::Usm => self.usm(),
            Suite::Extremality => self.extremality(),
            Suite::Minimax => self.minimax(),
        }
    }

    fn dag(&self) -> &'a Dag {
        self.problem.dag()
    }

    fn cbn(&self, suite: Suite) -> Result<&'a Cbn> {
        self.cbn.ok_or_else(|| {
            Error::InvalidProblem(format!("the {suite} suite needs a parametrized network"))
        })
    }

    fn all_subsets(&self) -> Result<Vec<NodeSet>> {
        self.budget
            .check_intervenable(self.problem.intervenable().len())?;
        Ok(subsets(self.problem.intervenable()))
    }

    fn optimum(
        &mut self,
        cbn: &Cbn,
        drivers: &NodeSet,
        class: IpClass,
        dir: Direction,
    ) -> Result<PolicyOptimum> {
        let key = (drivers.clone(), class, dir);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let best = optimal_policy_value(
            cbn,
            drivers,
            class,
            self.problem.desired(),
            dir,
            &self.budget,
        )?;
        self.cache.insert(key, best.clone());
        Ok(best)
    }

    fn witness_text(&self, cbn: &Cbn, pair: &InterventionPair) -> String {
        pair.describe(self.dag(), cbn.cards())
    }

    /// Checks `min <= P(O) <= max` for every subset and each of `classes`.
    /// Class-0 is refused: atomic interventions can miss the baseline.
    pub fn lemma3(&mut self, classes: &[IpClass]) -> Result<Vec<Check>> {
        if classes.iter().any(|c| c.is_atomic()) {
            return Err(Error::InvalidProblem(
                "baseline bracketing only holds for policy classes 1 and above; class-0 was requested"
                    .into(),
            ));
        }
        let cbn = self.cbn(Suite::Lemma3)?;
        let base = cbn.marginal_prob(self.problem.desired())?;
        let subsets = self.all_subsets()?;
        let mut checks = Vec::new();
        for &class in classes {
            let mut failure = None;
            for x in &subsets {
                let lo = self.optimum(cbn, x, class, Direction::Min)?;
                let hi = self.optimum(cbn, x, class, Direction::Max)?;
                if lo.value > base + TOLERANCE {
                    failure = Some(format!(
                        "subset {}: min {} > P(O) {}\nwitness:\n{}",
                        self.dag().fmt_set(x),
                        p9(lo.value),
                        p9(base),
                        self.witness_text(cbn, &lo.witness)
                    ));
                } else if hi.value < base - TOLERANCE {
                    failure = Some(format!(
                        "subset {}: max {} < P(O) {}\nwitness:\n{}",
                        self.dag().fmt_set(x),
                        p9(hi.value),
                        p9(base),
                        self.witness_text(cbn, &hi.witness)
                    ));
                }
                if failure.is_some() {
                    break;
                }
            }
            checks.push(Check {
                suite: Suite::Lemma3,
                name: format!("min <= P(O) <= max, {class}"),
                passed: failure.is_none(),
                detail: failure.unwrap_or_else(|| {
                    format!("{} subsets bracket P(O) = {}", subsets.len(), p9(base))
                }),
            });
        }
        Ok(checks)
    }

    /// The backward-chaining drivers reach the best class-inf value of any
    /// subset of the intervenable set, in both directions.
    pub fn sufficiency(&mut self) -> Result<Vec<Check>> {
        let cbn = self.cbn(Suite::Sufficiency)?;
        let drivers = c_star(self.problem).members;
        let subsets = self.all_subsets()?;
        let mut checks = Vec::new();
        for dir in [Direction::Max, Direction::Min] {
            let ours = self.optimum(cbn, &drivers, IpClass::INFINITE, dir)?;
            let mut failure = None;
            for y in &subsets {
                let theirs = self.optimum(cbn, y, IpClass::INFINITE, dir)?;
                let beaten = match dir {
                    Direction::Max => theirs.value > ours.value + TOLERANCE,
                    Direction::Min => theirs.value < ours.value - TOLERANCE,
                };
                if beaten {
                    failure = Some(format!(
                        "subset {} reaches {} but drivers {} only {}\nwitness:\n{}",
                        self.dag().fmt_set(y),
                        p9(theirs.value),
                        self.dag().fmt_set(&drivers),
                        p9(ours.value),
                        self.witness_text(cbn, &theirs.witness)
                    ));
                    break;
                }
            }
            checks.push(Check {
                suite: Suite::Sufficiency,
                name: format!(
                    "drivers {} optimal over all subsets ({})",
                    self.dag().fmt_set(&drivers),
                    dir_name(dir)
                ),
                passed: failure.is_none(),
                detail: failure.unwrap_or_else(|| {
                    format!("{} over {} subsets", p9(ours.value), subsets.len())
                }),
            });
        }
        Ok(checks)
    }

    /// Builds the adversarial parametrization for the backward-chaining
    /// drivers and checks both of its guarantees exactly.
    pub fn usm(&mut self) -> Result<Vec<Check>> {
        let dag = self.dag();
        let drivers = c_star(self.problem).members;
        self.budget.check_intervenable(drivers.len())?;
        let (cbn, desired) = usm_adversarial_cbn(dag, &drivers, &self.problem.targets())?;
        let all_on: InterventionPair = drivers
            .iter()
            .map(|&d| InterventionPolicy::atomic(dag, cbn.cards(), d, 1))
            .collect::<Result<_>>()?;
        let full = interventional_prob(&cbn, &all_on, &desired)?;
        let mut checks = vec![Check {
            suite: Suite::Usm,
            name: format!("forcing {} to 1 gives probability 1", dag.fmt_set(&drivers)),
            passed: full == 1.0,
            detail: format!("P(targets = 1) = {}", p9(full)),
        }];

        let mut failure = None;
        let mut proper = 0usize;
        for y in subsets(&drivers) {
            if y.len() == drivers.len() {
                continue;
            }
            proper += 1;
            let best = optimal_policy_value(
                &cbn,
                &y,
                IpClass::INFINITE,
                &desired,
                Direction::Max,
                &self.budget,
            )?;
            if best.value != 0.0 {
                failure = Some(format!(
                    "subset {} reaches {}\nwitness:\n{}",
                    dag.fmt_set(&y),
                    p9(best.value),
                    best.witness.describe(dag, cbn.cards())
                ));
                break;
            }
        }
        checks.push(Check {
            suite: Suite::Usm,
            name: "every proper subset gives probability 0".into(),
            passed: failure.is_none(),
            detail: failure.unwrap_or_else(|| {
                format!("{proper} proper subsets, best class-inf value {}", p9(0.0))
            }),
        });
        Ok(checks)
    }

    /// Walks the stochastic-policy grid for every subset and every policy
    /// class with a distinct scope layout. Combinations whose grid exceeds
    /// the budget are skipped and counted.
    pub fn extremality(&mut self) -> Result<Vec<Check>> {
        let cbn = self.cbn(Suite::Extremality)?;
        let subsets = self.all_subsets()?;
        let classes = [
            IpClass::ATOMIC,
            IpClass::finite(1),
            IpClass::finite(2),
            IpClass::INFINITE,
        ];
        let mut checks = Vec::new();
        for dir in [Direction::Max, Direction::Min] {
            let mut walked = 0usize;
            let mut skipped = 0usize;
            let mut points = 0u64;
            let mut failure = None;
            'outer: for x in &subsets {
                let mut layouts = Vec::new();
                for class in classes {
                    let grid = PolicyGrid::new(cbn, x, class, self.problem.desired())?;
                    if layouts.contains(&grid.layout) {
                        continue;
                    }
                    layouts.push(grid.layout.clone());
                    let Some(size) = grid.size().filter(|&s| s <= self.budget.max_grid_points)
                    else {
                        skipped += 1;
                        continue;
                    };
                    let det = self.optimum(cbn, x, class, dir)?;
                    walked += 1;
                    points += size;
                    if let Some((value, pair)) = grid.find_improvement(dir, det.value) {
                        failure = Some(format!(
                            "subset {}, {class}: stochastic {} beats deterministic {}\npolicy:\n{}",
                            self.dag().fmt_set(x),
                            p9(value),
                            p9(det.value),
                            self.witness_text(cbn, &pair)
                        ));
                        break 'outer;
                    }
                }
            }
            checks.push(Check {
                suite: Suite::Extremality,
                name: format!("grid step {GRID_STEP} never beats deterministic ({})", dir_name(dir)),
                passed: failure.is_none(),
                detail: failure.unwrap_or_else(|| {
                    format!("{walked} combinations, {points} grid points, {skipped} skipped over budget")
                }),
            });
        }
        Ok(checks)
    }

    /// min over subsets of the class-inf max (and max of the min) equals
    /// P(O) at the empty set; min-min with an intervenable target reaches 0.
    pub fn minimax(&mut self) -> Result<Vec<Check>> {
        let cbn = self.cbn(Suite::Minimax)?;
        let base = cbn.marginal_prob(self.problem.desired())?;
        let subsets = self.all_subsets()?;
        let mut checks = Vec::new();
        for (outer, inner, name) in [
            (Direction::Min, Direction::Max, "min over subsets of max"),
            (Direction::Max, Direction::Min, "max over subsets of min"),
        ] {
            let mut best: Option<(f64, &NodeSet)> = None;
            for x in &subsets {
                let v = self.optimum(cbn, x, IpClass::INFINITE, inner)?.value;
                let improves = match best {
                    None => true,
                    Some((b, _)) => match outer {
                        Direction::Min => v < b - TOLERANCE,
                        Direction::Max => v > b + TOLERANCE,
                    },
                };
                if improves {
                    best = Some((v, x));
                }
            }
            let (value, arg) = best.expect("the empty subset is always present");
            let passed = (value - base).abs() <= TOLERANCE && arg.is_empty();
            checks.push(Check {
                suite: Suite::Minimax,
                name: format!("{name} equals P(O) at the empty set"),
                passed,
                detail: format!(
                    "{} at {}, P(O) = {}",
                    p9(value),
                    self.dag().fmt_set(arg),
                    p9(base)
                ),
            });
        }

        let check = if self.problem.intervenable_targets().is_empty() {
            Check {
                suite: Suite::Minimax,
                name: "min-min with an intervenable target".into(),
                passed: true,
                detail: "not applicable: no target is intervenable".into(),
            }
        } else {
            let problem = self.problem.clone().with_objective(Objective::MinMin);
            let r = solve(&problem, Some(cbn), &self.budget)?;
            let value = r.value().expect("solved with a parametrization");
            Check {
                suite: Suite::Minimax,
                name: "min-min with an intervenable target".into(),
                passed: value == 0.0 && r.drivers.members.len() == 1,
                detail: format!(
                    "drivers {}, value {}",
                    self.dag().fmt_set(&r.drivers.members),
                    p9(value)
                ),
            }
        };
        checks.push(check);
        Ok(checks)
    }
}

fn dir_name(dir: Direction) -> &'static str {
    match dir {
        Direction::Max => "max",
        Direction::Min => "min",
    }
}

struct GridNode {
    node: NodeId,
    parents: Vec<usize>,
    strides: Vec<usize>,
    card: usize,
    table: Vec<f64>,
    /// Scope, for intervened nodes.
    scope: Option<Vec<NodeId>>,
}

/// The relevant part of an intervened network with editable policy tables.
struct PolicyGrid<'a> {
    cbn: &'a Cbn,
    nodes: Vec<GridNode>,
    desired: Vec<Option<usize>>,
    /// (driver, scope) for every driver that can reach a target.
    layout: Vec<(NodeId, Vec<NodeId>)>,
}

impl<'a> PolicyGrid<'a> {
    fn new(cbn: &'a Cbn, drivers: &NodeSet, class: IpClass, desired: &Assignment) -> Result<Self> {
        let dag = cbn.dag();
        let relevant = dag.ancestral_closure(&desired.nodes())?;
        let mut nodes = Vec::new();
        let mut layout = Vec::new();
        for &v in dag.topological_order() {
            if !relevant.contains(&v) {
                continue;
            }
            let card = cbn.card(v);
            let (parents, table, scope) = if drivers.contains(&v) {
                let scope: Vec<NodeId> = scope_for_class(dag, v, class)?.into_iter().collect();
                let rows: usize = scope.iter().map(|s| cbn.card(*s)).product();
                layout.push((v, scope.clone()));
                (scope.clone(), vec![0.0; rows * card], Some(scope))
            } else {
                let cpd = cbn.cpd(v);
                (cpd.parents().to_vec(), cpd.table().to_vec(), None)
            };
            let mut strides = vec![1; parents.len()];
            for i in (0..parents.len().saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * cbn.card(parents[i + 1]);
            }
            nodes.push(GridNode {
                node: v,
                parents: parents.iter().map(|p| p.index()).collect(),
                strides,
                card,
                table,
                scope,
            });
        }
        let mut want = vec![None; dag.len()];
        for (v, x) in desired.iter() {
            want[v.index()] = Some(x);
        }
        Ok(PolicyGrid {
            cbn,
            nodes,
            desired: want,
            layout,
        })
    }

    /// (node position, row) for every editable row.
    fn rows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.scope.is_some() {
                out.extend((0..n.table.len() / n.card).map(|r| (i, r)));
            }
        }
        out
    }

    fn size(&self) -> Option<u64> {
        self.rows().iter().try_fold(1u64, |acc, &(i, _)| {
            acc.checked_mul(simplex_points(self.nodes[i].card).len() as u64)
        })
    }

    fn eval(&self) -> f64 {
        let mut state = vec![0usize; self.desired.len()];
        self.eval_from(0, &mut state)
    }

    fn eval_from(&self, i: usize, state: &mut [usize]) -> f64 {
        let Some(n) = self.nodes.get(i) else {
            return 1.0;
        };
        let row: usize = n
            .parents
            .iter()
            .zip(&n.strides)
            .map(|(&p, s)| state[p] * s)
            .sum();
        let probs = &n.table[row * n.card..(row + 1) * n.card];
        let v = n.node.index();
        let mut total = 0.0;
        for (x, &p) in probs.iter().enumerate() {
            if p == 0.0 || self.desired[v].is_some_and(|want| want != x) {
                continue;
            }
            state[v] = x;
            total += p * self.eval_from(i + 1, state);
        }
        total
    }

    /// Walks the whole grid; returns the first point beating `reference` by
    /// more than the tolerance.
    fn find_improvement(
        mut self,
        dir: Direction,
        reference: f64,
    ) -> Option<(f64, InterventionPair)> {
        let rows = self.rows();
        let choices: Vec<Vec<Vec<f64>>> = rows
            .iter()
            .map(|&(i, _)| simplex_points(self.nodes[i].card))
            .collect();
        let mut digits = vec![0usize; rows.len()];
        loop {
            for (k, &(i, r)) in rows.iter().enumerate() {
                let card = self.nodes[i].card;
                self.nodes[i].table[r * card..(r + 1) * card]
                    .copy_from_slice(&choices[k][digits[k]]);
            }
            let value = self.eval();
            let better = match dir {
                Direction::Max => value > reference + TOLERANCE,
                Direction::Min => value < reference - TOLERANCE,
            };
            if better {
                return Some((value, self.pair()));
            }
            let mut k = rows.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < choices[k].len() {
                    break;
                }
                digits[k] = 0;
            }
        }
    }

    fn pair(&self) -> InterventionPair {
        let dag = self.cbn.dag();
        self.nodes
            .iter()
            .filter_map(|n| {
                let scope = n.scope.clone()?;
                Some(
                    InterventionPolicy::new(dag, self.cbn.cards(), n.node, scope, n.table.clone())
                        .expect("grid rows are distributions over a valid scope"),
                )
            })
            .collect()
    }
}

/// Points of the probability simplex over `card` values with coordinates
/// on the grid.
fn simplex_points(card: usize) -> Vec<Vec<f64>> {
    fn fill(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&t| t as f64 * GRID_STEP).collect());
            prefix.pop();
            return;
        }
        for t in 0..=left {
            prefix.push(t);
            fill(left - t, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(GRID_TICKS, card, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbn::Cpd;

    fn xor_net(p: f64) -> Cbn {
        let dag = Dag::new(["x", "y", "o"], [("x", "y"), ("x", "o"), ("y", "o")]).unwrap();
        let cards = vec![2; 3];
        let x = dag.node("x").unwrap();
        let y = dag.node("y").unwrap();
        let o = dag.node("o").unwrap();
        let cpds = vec![
            Cpd::new(&dag, &cards, x, vec![], vec![1.0 - p, p]).unwrap(),
            Cpd::deterministic(&dag, &cards, y, vec![x], |c| 1 - c[0]).unwrap(),
            Cpd::deterministic(&dag, &cards, o, vec![x, y], |c| c[0] ^ c[1]).unwrap(),
        ];
        Cbn::new(dag, cards, cpds).unwrap()
    }

    fn xor_problem(cbn: &Cbn, vi: &[&str]) -> ControlProblem {
        let dag = cbn.dag().clone();
        let desired = Assignment::from_names(&dag, [("o", 1)]).unwrap();
        ControlProblem::new(
            dag.clone(),
            dag.node_set(vi.iter().copied()).unwrap(),
            desired,
            Objective::MaxMax,
        )
        .unwrap()
    }

    #[test]
    fn simplex_grid_sizes() {
        assert_eq!(simplex_points(2).len(), 5);
        assert_eq!(simplex_points(3).len(), 15);
        for p in simplex_points(3) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subsets_in_mask_order() {
        let g = Dag::new(["a", "b"], Vec::<(&str, &str)>::new()).unwrap();
        let all = subsets(&g.node_set(["a", "b"]).unwrap());
        let names: Vec<String> = all.iter().map(|s| g.fmt_set(s)).collect();
        assert_eq!(names, ["{}", "{a}", "{b}", "{a, b}"]);
    }

    #[test]
    fn grid_eval_matches_enumeration() {
        let cbn = xor_net(0.7);
        let desired = Assignment::from_names(cbn.dag(), [("o", 1)]).unwrap();
        let drivers = cbn.dag().node_set(["y"]).unwrap();
        let mut grid = PolicyGrid::new(&cbn, &drivers, IpClass::INFINITE, &desired).unwrap();
        grid.nodes[1].table = vec![0.25, 0.75, 0.5, 0.5];
        let direct = interventional_prob(&cbn, &grid.pair(), &desired).unwrap();
        assert!((grid.eval() - direct).abs() < 1e-12);
    }

    #[test]
    fn all_suites_pass_on_xor() {
        let cbn = xor_net(0.7);
        let problem = xor_problem(&cbn, &["x", "y"]);
        let mut v = Verifier::new(&problem, Some(&cbn), Budget::default()).unwrap();
        for suite in Suite::ALL {
            for check in v.run(suite).unwrap() {
                assert!(check.passed, "{suite}: {} {}", check.name, check.detail);
            }
        }
    }

    #[test]
    fn class_zero_bracketing_is_refused() {
        let cbn = xor_net(0.7);
        let problem = xor_problem(&cbn, &["y"]);
        let mut v = Verifier::new(&problem, Some(&cbn), Budget::default()).unwrap();
        assert!(matches!(
            v.lemma3(&[IpClass::ATOMIC]),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn structural_suite_needs_no_parameters() {
        let dag = Dag::new(
            ["o", "t1", "t2", "t3", "t4", "t5"],
            [
                ("t1", "o"),
                ("t2", "t1"),
                ("t3", "t1"),
                ("t4", "t2"),
                ("t5", "t2"),
            ],
        )
        .unwrap();
        let problem = ControlProblem::new(
            dag.clone(),
            dag.node_set(["t3", "t4"]).unwrap(),
            Assignment::from_names(&dag, [("o", 1)]).unwrap(),
            Objective::MaxMax,
        )
        .unwrap();
        let mut v = Verifier::new(&problem, None, Budget::default()).unwrap();
        let checks = v.run(Suite::Usm).unwrap();
        assert!(checks.iter().all(|c| c.passed));
        assert!(v.run(Suite::Lemma3).is_err());
    }
}
