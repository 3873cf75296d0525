//! Driver-variable identification and intervention-policy optimization for
//! discrete causal Bayesian networks.
//!
//! Given a DAG, a set of nodes we may intervene on and a desired value for
//! some target nodes, [`controllability::c_star`] picks the drivers from the
//! graph alone. With a parametrized network, [`controllability::solve`]
//! also finds the best policy for them and its exact value.
//!
//! ```
//! use causal_control::cbn::Assignment;
//! use causal_control::controllability::{c_star, ControlProblem, Objective};
//! use causal_control::graph::Dag;
//!
//! let g = Dag::new(["a", "b", "t"], [("a", "b"), ("b", "t")])?;
//! let problem = ControlProblem::new(
//!     g.clone(),
//!     g.node_set(["a", "b"])?,
//!     Assignment::from_names(&g, [("t", 1)])?,
//!     Objective::MaxMax,
//! )?;
//! assert_eq!(g.fmt_set(&c_star(&problem).members), "{b}");
//! # Ok::<(), causal_control::error::Error>(())
//! ```
//!
//! Inference is exact enumeration; every exhaustive routine takes a
//! [`Budget`] and refuses larger inputs.

pub mod cbn;
pub mod controllability;
pub mod error;
pub mod graph;
pub mod intervention;
pub mod random;
pub mod verify;

pub use cbn::{Assignment, Cbn, Cpd};
pub use controllability::{Budget, ControlProblem, Objective};
pub use error::{Error, Result};
pub use graph::{Dag, Level, NodeId, NodeSet};
pub use intervention::{InterventionPair, InterventionPolicy, IpClass};

// The guide's listings run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/interventions.md")]
    mod interventions {}
    #[doc = include_str!("../../../book/src/drivers.md")]
    mod drivers {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
