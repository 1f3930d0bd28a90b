use thiserror::Error;

/// Errors surfaced by the embedding toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("infeasible mapping: {0}")]
    InfeasibleMapping(String),

    #[error("virtual node {0} has no remaining placement after pre-fixing")]
    PrefixInfeasible(String),

    #[error("instance exceeds enumeration bounds: {0}")]
    TooLarge(String),

    #[error("augmented network requires exactly one virtual edge, found {0}")]
    NotSingleEdge(usize),

    #[error("substrate network is not a path")]
    NotAPath,

    #[error("point violates flow conservation: {0}")]
    FlowConservation(String),

    #[error("decomposition contract violated: {0}")]
    Contract(String),

    #[error("solver limit reached: {0}")]
    SolverLimit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
