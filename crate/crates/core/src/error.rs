use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge list contains no edges")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown motif `{0}`")]
    UnknownMotif(String),

    #[error("motif size {0} is not supported; the census covers self-loops and 3-node subgraphs")]
    UnsupportedMotifSize(usize),

    #[error("unknown circuit model `{0}`")]
    UnknownModel(String),

    #[error("ensemble has {got} members, at least {need} are required")]
    EnsembleTooSmall { got: usize, need: usize },

    #[error("not a valid induced subgraph: {0}")]
    NotInducedSubgraph(String),

    #[error("no start node with a nonempty neighborhood after {0} draws")]
    IsolatedStart(usize),

    #[error("state became non-finite at t = {time}")]
    NonFinite { time: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

/// Coarse error category, used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_)
            | Error::UnknownMotif(_)
            | Error::UnsupportedMotifSize(_)
            | Error::UnknownModel(_)
            | Error::EnsembleTooSmall { .. } => ErrorKind::Usage,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::EmptyInput
            | Error::NotInducedSubgraph(_)
            | Error::IsolatedStart(_) => ErrorKind::Data,
            Error::NonFinite { .. } | Error::Numeric(_) => ErrorKind::Numeric,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
