use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("directed cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("invalid node name {0:?}: names are nonempty strings over [A-Za-z0-9_]")]
    InvalidName(String),
    #[error("graph has {0} nodes; at most {max} are supported", max = crate::nodeset::MAX_NODES)]
    TooManyNodes(usize),
    #[error("variable sets overlap: {0}")]
    Overlap(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("variable {0} is not in the distribution table")]
    UnknownVariable(String),
    #[error("value {value} for {var} is outside its domain of size {domain}")]
    DomainMismatch {
        var: String,
        value: usize,
        domain: usize,
    },
    #[error("policy table for {action} has {found} entries, expected {expected}")]
    PolicyShape {
        action: String,
        found: usize,
        expected: usize,
    },
    #[error("invalid distribution table: {0}")]
    InvalidTable(String),
    #[error("malformed expression JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("query needs at least one outcome variable")]
    EmptyOutcome,
    #[error("variable {0} appears in more than one role")]
    Overlap(String),
    #[error("{0} is not a single C-component")]
    NotCComponent(String),
    #[error("{inner} is not a nonempty subset of {outer}")]
    NotNested { inner: String, outer: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("stage {stage} reads undeclared variable {var}")]
    UndeclaredInput { stage: usize, var: String },
    #[error("stage {stage} observes {var}, which its own or a later action can affect")]
    ObservationAfterAction { stage: usize, var: String },
    #[error("variable {0} plays more than one role in the plan")]
    Overlap(String),
    #[error("plan needs at least one stage and one outcome")]
    Empty,
    #[error("policy for {action} has {found} entries, expected {expected}")]
    PolicyShape {
        action: String,
        found: usize,
        expected: usize,
    },
    #[error("policy for {action} chooses {value}, outside the domain of size {domain}")]
    PolicyValue {
        action: String,
        value: usize,
        domain: usize,
    },
    #[error("stage {stage} acts on {var}, an ancestor of an earlier action")]
    StageOrder { stage: usize, var: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("models induce different graphs")]
    GraphMismatch,
    #[error("invalid hedge: {0}")]
    InvalidHedge(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid assignment: {0}")]
    Assignment(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Query(#[from] QueryError),
}
