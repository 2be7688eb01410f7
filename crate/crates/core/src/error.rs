use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid lobster spec: {0}")]
    InvalidSpec(String),

    #[error("graph is not a tree ({0})")]
    NotATree(String),

    #[error("not a lobster: vertex {vertex} is at distance {distance} from the spine")]
    NotALobster { vertex: usize, distance: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),

    #[error("input too large: {what} = {got}, limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("symmetric eigensolver did not converge (matrix fingerprint {fingerprint:016x}, n = {n})")]
    EigenSolver { n: usize, fingerprint: u64 },

    #[error("could not build a witness with full support on {0:?} after bounded retries")]
    WitnessConstruction(Vec<usize>),

    #[error("minimality of a {0}-vertex set cannot be checked by subset enumeration (PCS, minimality unverified)")]
    MinimalityUnverified(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
