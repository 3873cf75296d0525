//! Driver-set identification and the four control objectives.
//!
//! [`c_star`] walks parent links backwards from the targets and stops at the
//! first intervenable node on every path; the stop nodes it reaches form a
//! driver set that is sufficient under class-inf policies. [`solve`] pairs
//! that structural answer with an optimal witness policy when a
//! parametrization is available, and short-circuits the objectives that have
//! closed-form answers.

mod search;

pub use search::{optimal_policy_value, Direction, PolicyOptimum};

use std::fmt;
use std::str::FromStr;

use crate::cbn::{Assignment, Cbn, Cpd};
use crate::error::{Error, Result};
use crate::graph::{BackwardChain, Dag, NodeId, NodeSet};
use crate::intervention::{interventional_prob, InterventionPair, InterventionPolicy, IpClass};

/// Limits for the exhaustive routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest joint state space that may be enumerated.
    pub max_states: usize,
    /// Largest intervenable set whose subsets may be enumerated.
    pub max_intervenable: usize,
    /// Relaxation sweeps a single policy search may spend.
    pub max_sweeps: u64,
    /// Largest stochastic-policy grid the extremality check may walk.
    pub max_grid_points: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1 << 14,
            max_intervenable: 10,
            max_sweeps: 2_000_000,
            max_grid_points: 15_625,
        }
    }
}

impl Budget {
    pub fn check_intervenable(&self, n: usize) -> Result<()> {
        if n > self.max_intervenable {
            return Err(Error::BudgetExceeded {
                what: "intervenable subsets",
                required: format!("2^{n} subsets"),
                limit: format!("2^{}", self.max_intervenable),
            });
        }
        Ok(())
    }
}

/// The four ways of combining the choice of drivers with the choice of
/// policies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    MinMin,
    MaxMax,
    MinMax,
    MaxMin,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MinMin => "min-min",
            Objective::MaxMax => "max-max",
            Objective::MinMax => "min-max",
            Objective::MaxMin => "max-min",
        })
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('_', "-").to_ascii_lowercase().as_str() {
            "min-min" | "minmin" => Ok(Objective::MinMin),
            "max-max" | "maxmax" => Ok(Objective::MaxMax),
            "min-max" | "minmax" => Ok(Objective::MinMax),
            "max-min" | "maxmin" => Ok(Objective::MaxMin),
            _ => Err(format!(
                "unknown objective `{s}` (expected min-min, max-max, min-max or max-min)"
            )),
        }
    }
}

/// What to control, with what, and towards which realization.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlProblem {
    dag: Dag,
    intervenable: NodeSet,
    desired: Assignment,
    objective: Objective,
}

impl ControlProblem {
    pub fn new(
        dag: Dag,
        intervenable: NodeSet,
        desired: Assignment,
        objective: Objective,
    ) -> Result<Self> {
        if desired.is_empty() {
            return Err(Error::InvalidProblem(
                "at least one target is required".into(),
            ));
        }
        for v in intervenable.iter().copied().chain(desired.nodes()) {
            if !dag.contains(v) {
                return Err(Error::NodeOutOfRange(v.index()));
            }
        }
        Ok(ControlProblem {
            dag,
            intervenable,
            desired,
            objective,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn intervenable(&self) -> &NodeSet {
        &self.intervenable
    }

    pub fn targets(&self) -> NodeSet {
        self.desired.nodes()
    }

    pub fn desired(&self) -> &Assignment {
        &self.desired
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    /// Targets that are themselves intervenable.
    pub fn intervenable_targets(&self) -> NodeSet {
        self.targets()
            .intersection(&self.intervenable)
            .copied()
            .collect()
    }
}

/// How a driver set was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    CStar,
    ExhaustiveOracle,
    Shortcut,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::CStar => "backward-chaining",
            Provenance::ExhaustiveOracle => "exhaustive",
            Provenance::Shortcut => "closed-form",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriverSet {
    pub members: NodeSet,
    pub provenance: Provenance,
}

/// The value side of a [`SolveResult`].
#[derive(Clone, Debug, PartialEq)]
pub enum SolveValue {
    /// No parametrization was given; only the drivers are known.
    StructuralOnly,
    Exact {
        value: f64,
        witness: InterventionPair,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub drivers: DriverSet,
    pub value: SolveValue,
}

impl SolveResult {
    pub fn value(&self) -> Option<f64> {
        match &self.value {
            SolveValue::Exact { value, .. } => Some(*value),
            SolveValue::StructuralOnly => None,
        }
    }

    pub fn witness(&self) -> Option<&InterventionPair> {
        match &self.value {
            SolveValue::Exact { witness, .. } => Some(witness),
            SolveValue::StructuralOnly => None,
        }
    }
}

/// Backward chaining from the targets, stopping at intervenable nodes.
pub fn c_star_trace(problem: &ControlProblem) -> BackwardChain {
    problem
        .dag
        .backward_chain(&problem.targets(), &problem.intervenable)
        .expect("problem nodes validated at construction")
}

/// The driver set: every intervenable node at which backward chaining from
/// the targets stops.
pub fn c_star(problem: &ControlProblem) -> DriverSet {
    DriverSet {
        members: c_star_trace(problem).terminals,
        provenance: Provenance::CStar,
    }
}

/// Solves `problem`, optimizing policies when `cbn` is supplied.
///
/// * max-max: drivers from [`c_star`], class-inf maximization.
/// * min-min: a single intervenable target, forced off its desired value,
///   when one exists; otherwise [`c_star`] with class-inf minimization.
/// * min-max and max-min: no intervention; the value is the baseline
///   probability of the desired realization.
pub fn solve(problem: &ControlProblem, cbn: Option<&Cbn>, budget: &Budget) -> Result<SolveResult> {
    if let Some(cbn) = cbn {
        if cbn.dag() != problem.dag() {
            return Err(Error::InvalidProblem(
                "the parametrization does not match the problem's graph".into(),
            ));
        }
        cbn.check_assignment(problem.desired())?;
    }
    let optimize = |drivers: DriverSet, dir: Direction| -> Result<SolveResult> {
        let value = match cbn {
            None => SolveValue::StructuralOnly,
            Some(cbn) => {
                let best = optimal_policy_value(
                    cbn,
                    &drivers.members,
                    IpClass::INFINITE,
                    problem.desired(),
                    dir,
                    budget,
                )?;
                SolveValue::Exact {
                    value: best.value,
                    witness: best.witness,
                }
            }
        };
        Ok(SolveResult { drivers, value })
    };

    match problem.objective() {
        Objective::MaxMax => optimize(c_star(problem), Direction::Max),
        Objective::MinMin => match problem.intervenable_targets().first() {
            Some(&target) => {
                let drivers = DriverSet {
                    members: NodeSet::from([target]),
                    provenance: Provenance::Shortcut,
                };
                let value =
                    match cbn {
                        None => SolveValue::StructuralOnly,
                        Some(cbn) => {
                            let want = problem.desired().get(target).expect("target has a value");
                            let off = if want == 0 { 1 } else { 0 };
                            let witness = InterventionPair::empty().with(
                                InterventionPolicy::atomic(cbn.dag(), cbn.cards(), target, off)?,
                            );
                            let value = interventional_prob(cbn, &witness, problem.desired())?;
                            SolveValue::Exact { value, witness }
                        }
                    };
                Ok(SolveResult { drivers, value })
            }
            None => optimize(c_star(problem), Direction::Min),
        },
        Objective::MinMax | Objective::MaxMin => {
            let drivers = DriverSet {
                members: NodeSet::new(),
                provenance: Provenance::Shortcut,
            };
            let value = match cbn {
                None => SolveValue::StructuralOnly,
                Some(cbn) => SolveValue::Exact {
                    value: cbn.marginal_prob(problem.desired())?,
                    witness: InterventionPair::empty(),
                },
            };
            Ok(SolveResult { drivers, value })
        }
    }
}

/// A binary parametrization of `dag` in which `drivers` cannot be trimmed.
///
/// Every driver is stuck at 0 whatever its parents do. Every other
/// descendant of the drivers is an AND gate over those of its parents that
/// are drivers or descendants of drivers; its remaining parents have no
/// influence. Targets outside the drivers' reach are stuck at 1, and all
/// other nodes are fair coins. The desired realization sets every target to
/// 1.
///
/// When `drivers` is the backward-chaining driver set for `targets`, forcing
/// every driver to 1 produces the desired realization with probability one,
/// while any intervention that leaves some driver alone produces it with
/// probability zero.
pub fn usm_adversarial_cbn(
    dag: &Dag,
    drivers: &NodeSet,
    targets: &NodeSet,
) -> Result<(Cbn, Assignment)> {
    for &v in drivers.iter().chain(targets) {
        if !dag.contains(v) {
            return Err(Error::NodeOutOfRange(v.index()));
        }
    }
    if targets.is_empty() {
        return Err(Error::InvalidProblem(
            "at least one target is required".into(),
        ));
    }
    let cards = vec![2; dag.len()];
    let mut downstream = NodeSet::new();
    for &d in drivers {
        downstream.extend(dag.descendants(d)?);
    }
    let reached = |v: &NodeId| drivers.contains(v) || downstream.contains(v);

    let mut cpds = Vec::with_capacity(dag.len());
    for v in dag.nodes() {
        let parents = dag.parents(v).to_vec();
        let cpd = if drivers.contains(&v) {
            Cpd::deterministic(dag, &cards, v, parents, |_| 0)?
        } else if downstream.contains(&v) {
            let gate: Vec<bool> = parents.iter().map(&reached).collect();
            Cpd::deterministic(dag, &cards, v, parents, |cfg| {
                let all_on = cfg.iter().zip(&gate).all(|(&x, &g)| !g || x == 1);
                usize::from(all_on)
            })?
        } else if targets.contains(&v) {
            Cpd::deterministic(dag, &cards, v, parents, |_| 1)?
        } else {
            let rows = 1usize << parents.len();
            Cpd::new(dag, &cards, v, parents, vec![0.5; rows * 2])?
        };
        cpds.push(cpd);
    }
    let cbn = Cbn::new(dag.clone(), cards, cpds)?;
    let desired = targets.iter().map(|&t| (t, 1)).collect();
    Ok((cbn, desired))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branching() -> Dag {
        Dag::new(
            ["o", "t1", "t2", "t3", "t4", "t5"],
            [
                ("t1", "o"),
                ("t2", "t1"),
                ("t3", "t1"),
                ("t4", "t2"),
                ("t5", "t2"),
            ],
        )
        .unwrap()
    }

    fn problem(
        dag: &Dag,
        vi: &[&str],
        targets: &[(&str, usize)],
        obj: Objective,
    ) -> ControlProblem {
        ControlProblem::new(
            dag.clone(),
            dag.node_set(vi.iter().copied()).unwrap(),
            Assignment::from_names(dag, targets.iter().copied()).unwrap(),
            obj,
        )
        .unwrap()
    }

    #[test]
    fn c_star_examples() {
        let g = branching();
        let p = problem(&g, &["t3", "t4"], &[("o", 1)], Objective::MaxMax);
        assert_eq!(c_star(&p).members, g.node_set(["t3", "t4"]).unwrap());

        let screen = Dag::new(["y2", "y1", "o"], [("y2", "y1"), ("y1", "o")]).unwrap();
        let p = problem(&screen, &["y1", "y2"], &[("o", 1)], Objective::MaxMax);
        assert_eq!(c_star(&p).members, screen.node_set(["y1"]).unwrap());

        let p = problem(&g, &[], &[("o", 1)], Objective::MaxMax);
        assert!(c_star(&p).members.is_empty());
    }

    #[test]
    fn structural_solve_has_no_value() {
        let g = branching();
        let p = problem(&g, &["t3", "t4"], &[("o", 1)], Objective::MaxMax);
        let r = solve(&p, None, &Budget::default()).unwrap();
        assert_eq!(r.drivers.members, g.node_set(["t3", "t4"]).unwrap());
        assert_eq!(r.value, SolveValue::StructuralOnly);
    }

    #[test]
    fn objective_names_round_trip() {
        for o in [
            Objective::MinMin,
            Objective::MaxMax,
            Objective::MinMax,
            Objective::MaxMin,
        ] {
            assert_eq!(o.to_string().parse::<Objective>().unwrap(), o);
        }
        assert!("sideways".parse::<Objective>().is_err());
    }

    #[test]
    fn problem_validation() {
        let g = branching();
        assert!(ControlProblem::new(
            g.clone(),
            NodeSet::new(),
            Assignment::new(),
            Objective::MaxMax
        )
        .is_err());
    }

    #[test]
    fn usm_parametrization_on_branching_structure() {
        let g = branching();
        let drivers = g.node_set(["t3", "t4"]).unwrap();
        let targets = g.node_set(["o"]).unwrap();
        let (cbn, desired) = usm_adversarial_cbn(&g, &drivers, &targets).unwrap();
        let all_on: InterventionPair = drivers
            .iter()
            .map(|&d| InterventionPolicy::atomic(&g, cbn.cards(), d, 1).unwrap())
            .collect();
        assert_eq!(interventional_prob(&cbn, &all_on, &desired).unwrap(), 1.0);
        assert_eq!(cbn.marginal_prob(&desired).unwrap(), 0.0);
        let only_t3 = optimal_policy_value(
            &cbn,
            &g.node_set(["t3"]).unwrap(),
            IpClass::INFINITE,
            &desired,
            Direction::Max,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(only_t3.value, 0.0);
    }
}
