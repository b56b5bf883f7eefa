use thiserror::Error;

/// Errors raised by graph construction, parsing, search and bounding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("vertex {vertex} is not in 0..{n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("configuration has {got} entries but the graph has {expected} vertices")]
    ConfigLength { expected: usize, got: usize },
    #[error("move {index} ({from} -> {to}) is invalid: {reason}")]
    InvalidMove {
        index: usize,
        from: usize,
        to: usize,
        reason: &'static str,
    },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid family parameters: {0}")]
    Family(String),
    #[error("invalid parent array: {0}")]
    ParentArray(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error(
        "level {level} needs {count} configurations, above the cap of {cap} \
         (last verified level: {last_verified:?})"
    )]
    CapExceeded {
        level: u64,
        count: u128,
        cap: u64,
        last_verified: Option<u64>,
    },
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),
    #[error("vertices {0:?} are not covered by any strategy")]
    Uncovered(Vec<usize>),
    #[error("strategy set is rooted at {got}, expected {expected}")]
    RootMismatch { expected: usize, got: usize },
    #[error("strategy set is empty")]
    EmptyStrategySet,
    #[error("linear program: {0}")]
    Lp(String),
    #[error("linear program is unbounded")]
    Unbounded,
}

pub type Result<T> = std::result::Result<T, Error>;
