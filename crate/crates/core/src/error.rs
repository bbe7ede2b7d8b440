use std::path::PathBuf;

use thiserror::Error;

use crate::model::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeIdError {
    #[error("malformed node id `{0}` (expected seg:k, qa:t or q:t)")]
    Malformed(String),
    #[error("unknown node kind in `{0}`")]
    UnknownKind(String),
    #[error("bad node index in `{0}`")]
    BadIndex(String),
    #[error("node index must be >= 1 in `{0}`")]
    ZeroIndex(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("example `{example_id}`, {field}: {message}")]
    Invalid {
        example_id: String,
        field: String,
        message: String,
    },
    #[error("duplicate example id `{0}`")]
    DuplicateExample(String),
    #[error("line {line}: duplicate prediction for ({example_id}, {turn})")]
    DuplicatePrediction {
        line: usize,
        example_id: String,
        turn: u32,
    },
    #[error("line {line}: {message}")]
    PredictionLine { line: usize, message: String },
    #[error("dataset is empty")]
    EmptyDataset,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("turn {turn} out of range 1..={turns}")]
    TurnOutOfRange { turn: u32, turns: usize },
    #[error("unresolved evidence reference {node} (cited by {consumer})")]
    Unresolved { node: NodeId, consumer: NodeId },
    #[error("chronology violation: {evidence} cannot be evidence for {consumer}")]
    Chronology { evidence: NodeId, consumer: NodeId },
    #[error("cycle: {}", fmt_nodes(.0))]
    Cycle(Vec<NodeId>),
    #[error("orphan node {0} has no path to the root")]
    Orphan(NodeId),
    #[error("multiple roots: {}", fmt_nodes(.0))]
    MultipleRoots(Vec<NodeId>),
    #[error("root {0} is not a question node or is missing from the node set")]
    BadRoot(NodeId),
    #[error("root {0} has outgoing edges")]
    RootHasConsumers(NodeId),
    #[error("edge endpoint {0} is not a graph node")]
    MissingEndpoint(NodeId),
    #[error("segment {0} has incoming edges")]
    SegmentWithEvidence(NodeId),
    #[error("path explosion: {count} paths exceed the cap of {cap}")]
    PathExplosion { count: u128, cap: usize },
}

fn fmt_nodes(nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("cannot align an empty path")]
    EmptyPath,
    #[error("weight matrix contains NaN at ({0}, {1})")]
    NaN(usize, usize),
    #[error("weight matrix rows have unequal lengths")]
    Ragged,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character `{ch}` at byte {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("unbalanced parenthesis at byte {offset}")]
    Unbalanced { offset: usize },
    #[error("dangling operator at byte {offset}")]
    Dangling { offset: usize },
    #[error("expected an operand at byte {offset}")]
    ExpectedOperand { offset: usize },
    #[error("malformed number at byte {offset}")]
    BadNumber { offset: usize },
    #[error("expression nesting exceeds depth {max}")]
    TooDeep { max: usize },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} of size {size} exceeds the oracle limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("cannot align an empty path")]
    EmptyPath,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("unknown strategy `{0}` (expected gold-echo, nearest-evidence or random-graph)")]
    UnknownStrategy(String),
}
