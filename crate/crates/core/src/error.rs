use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("endpoint {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gave up after {0} attempts without a simple graph satisfying the constraints")]
    RetriesExhausted(u32),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertices {0} and {1} are not connected")]
    Unreachable(usize, usize),
    #[error("graph has {n} vertices, above the cap of {cap} for this operation")]
    TooLarge { n: usize, cap: usize },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("not a cycle in the graph: {0}")]
    NotACycle(String),
}
