use crate::graph::{EdgeId, VertexId};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no edge between {0} and {1}")]
    MissingEdge(VertexId, VertexId),
    #[error("no edge with id {0}")]
    MissingEdgeId(EdgeId),
    #[error("edge id {0} already present")]
    DuplicateEdgeId(EdgeId),
    #[error("vertex {0} is not isolated")]
    VertexNotIsolated(VertexId),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("instance too large: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("round limit {0} exceeded")]
    RoundLimit(usize),
    #[error("hierarchy depth cap {0} exceeded")]
    DepthCap(usize),
    #[error("update budget exhausted")]
    Expired,
    #[error("stream error on line {line}: {msg}")]
    Stream { line: usize, msg: String },
    #[error("invalid query: {0}")]
    Query(String),
}

pub type Result<T> = std::result::Result<T, Error>;
