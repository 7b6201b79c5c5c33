use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading or validating a [`CodeGraph`](crate::graphs::CodeGraph).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph json: {0}")]
    Malformed(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge [{0},{1}] is not written as i < j")]
    EdgeOrder(usize, usize),
    #[error("edge [{0},{1}] listed twice")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("k_sys = {k_sys} out of range for n = {n} (need 1 <= k_sys < n)")]
    KSysOutOfRange { k_sys: usize, n: usize },
    #[error("n = {0} exceeds the supported maximum of 64 vertices")]
    TooLarge(usize),
    #[error("adjacency matrix is not symmetric at ({0},{1})")]
    Nonsymmetric(usize, usize),
    #[error("environment vertices {0} and {1} are adjacent")]
    EnvironmentEdge(usize, usize),
}

/// Errors raised while parsing or converting stabilizer generators.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilizerError {
    #[error("no stabilizer rows given")]
    Empty,
    #[error("row {row} has length {len}, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("illegal character {ch:?} in row {row}")]
    IllegalChar { row: usize, ch: char },
    #[error("rows {0} and {1} anticommute")]
    Anticommuting(usize, usize),
    #[error("row {0} is linearly dependent on earlier rows")]
    Dependent(usize),
    #[error("generator matrix has {rows} rows for {n} qubits; a full-rank state needs r = n")]
    RankDeficient { rows: usize, n: usize },
    #[error("{0} qubits exceed the supported maximum of 64")]
    TooLarge(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error("width mismatch: expected {expected}, got {got}")]
    Width { expected: usize, got: usize },
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            Error::Consistency(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
