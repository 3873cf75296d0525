use thiserror::Error;

/// Errors raised while building or querying networks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node name must not be empty")]
    EmptyName,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node index {0} is out of range")]
    NodeOutOfRange(usize),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("edge set contains a directed cycle through `{0}`")]
    Cycle(String),
    #[error("node sets must be pairwise disjoint; `{0}` appears twice")]
    OverlappingSets(String),
    #[error("node set must not be empty")]
    EmptySet,
    #[error("cardinality of `{node}` is {card}; every node needs at least 2 values")]
    InvalidCardinality { node: String, card: usize },
    #[error("invalid CPD for `{node}`: {reason}")]
    InvalidCpd { node: String, reason: String },
    #[error("no CPD supplied for `{0}`")]
    MissingCpd(String),
    #[error("value {value} is out of range for `{node}` (cardinality {card})")]
    ValueOutOfRange {
        node: String,
        value: usize,
        card: usize,
    },
    #[error("assignment does not cover `{0}`")]
    MissingAssignment(String),
    #[error("event must assign at least one node")]
    EmptyEvent,
    #[error("conditioning event has probability zero")]
    ZeroProbabilityConditioning,
    #[error("invalid intervention policy on `{node}`: {reason}")]
    InvalidPolicy { node: String, reason: String },
    #[error("i-DAGs were built over different base graphs")]
    BaseMismatch,
    #[error("invalid control problem: {0}")]
    InvalidProblem(String),
    #[error("budget exceeded: {what} needs {required}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        required: String,
        limit: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
