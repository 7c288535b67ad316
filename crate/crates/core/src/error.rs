//! Error type shared across the crate.

use crate::graph::NodeId;

/// Errors produced by graph construction, template parsing, solving, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("edge endpoint {0} does not exist")]
    UnknownEndpoint(NodeId),
    #[error("edge ({0}, {1}) already exists")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) does not exist")]
    UnknownEdge(NodeId, NodeId),
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid box constraint: {0}")]
    InvalidBox(String),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("negative weight {weight} for {context}")]
    NegativeWeight { weight: f64, context: String },
    #[error("unsupported composite objective: {0}")]
    UnsupportedComposite(String),
    #[error("objective on node {0} is unbounded below")]
    UnboundedObjective(NodeId),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("duplicate box clause")]
    DuplicateBox,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row dimension mismatch: {0}")]
    RowDimensionMismatch(String),
    #[error("invalid rho {0}: must be a positive finite real")]
    InvalidRho(f64),
    #[error("warm start for node {id}: expected dim {expected}, got {got}")]
    WarmStartDimMismatch {
        id: NodeId,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{file}:{line}: {message}")]
    ParseError {
        file: String,
        line: usize,
        message: String,
    },
    #[error("not a quadratic instance: {0}")]
    NotQuadratic(String),
    #[error("singular stationarity system: {0}")]
    SingularSystem(String),
    #[error("3-regular graph requires an even node count >= 4, got {0}")]
    OddNodeCount(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
