use std::path::PathBuf;

use thiserror::Error;

use crate::netgraph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fidelity {0} is outside [0.25, 1]")]
    FidelityOutOfRange(f64),
    #[error("Werner parameter {0} is outside [0, 1]")]
    WernerOutOfRange(f64),
    #[error("invalid noise parameters p2={p2}, eta={eta} (need 0 < p2 <= 1, 0.5 <= eta <= 1)")]
    InvalidNoise { p2: f64, eta: f64 },
    #[error("fidelity list is empty")]
    EmptyFidelities,
    #[error("circuit size {0} is outside 1..=8")]
    InvalidCircuitSize(usize),
    #[error("hop count {hops} is outside 1..={max}")]
    HopsOutOfRange { hops: usize, max: usize },
    #[error("malformed chain: {0}")]
    MalformedChain(String),
    #[error("malformed plan: {0}")]
    MalformedPlan(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no path from {0} to {1}")]
    NoPath(NodeId, NodeId),
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("invalid network document: {0}")]
    Document(String),
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Whether the error came from the filesystem rather than from bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
