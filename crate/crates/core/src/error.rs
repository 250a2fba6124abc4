use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// Vertices reachable from the first listed vertex do not reach the rest.
    #[error("disconnected: {context}; separated component {component:?}")]
    Disconnected {
        context: String,
        component: Vec<VertexId>,
    },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    /// The demand family does not have the shape the caller asked for.
    #[error("demand shape error: {0}")]
    Shape(String),

    #[error("graph must be unweighted (all costs 1); run subdivide_edges first: {0}")]
    Weighted(String),

    #[error("edge cost {0} is not a positive integer; scale costs to integers before subdividing")]
    NonIntegerCost(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("oracle limit exceeded: {what} is {actual}, limit {limit}")]
    OracleLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            Error::OracleLimit { .. } => 4,
            _ => 3,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.line() > 0 {
            Error::Parse(format!(
                "{} (line {}, column {})",
                err,
                err.line(),
                err.column()
            ))
        } else {
            Error::Parse(err.to_string())
        }
    }
}
