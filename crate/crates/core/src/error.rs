use thiserror::Error;

use crate::stream::Edge;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count must be at least 2, got {0}")]
    TooFewVertices(u64),
    #[error("proposal stream exhausted after {0} rounds")]
    StreamExhausted(u64),
    #[error("invalid stream mode: {0}")]
    InvalidMode(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u32, n: u32 },
    #[error("edge {0} is already present")]
    DuplicateEdge(Edge),
    #[error("graph has {0} vertices; brute force is limited to 12")]
    GraphTooLarge(u32),
    #[error("invalid phase plan: {0}")]
    InvalidPlan(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("row does not match the trial schema: {0}")]
    Schema(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
