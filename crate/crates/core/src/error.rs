use thiserror::Error;

/// Errors raised by the channel library.
///
/// The CLI maps these onto exit codes: argument problems are 1, numerical
/// failures are 2 and resource-cap violations are 3 (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("triple (k={k}, l={l}, m={m}) is not admissible: {reason}")]
    NotAdmissible {
        k: usize,
        l: usize,
        m: usize,
        reason: &'static str,
    },

    #[error("resource cap exceeded: {what} needs dimension {needed}, cap is {cap}")]
    ResourceCap { what: String, needed: usize, cap: usize },

    #[error("rank mismatch for H_{k}: expected {expected}, extracted {found}")]
    RankMismatch { k: usize, expected: usize, found: usize },

    #[error("numerical tolerance violated in {what}: deviation {deviation:e} > {tol:e}")]
    Tolerance { what: String, deviation: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn tolerance(what: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Error::Tolerance {
            what: what.into(),
            deviation,
            tol,
        }
    }

    pub fn cap(what: impl Into<String>, needed: usize, cap: usize) -> Self {
        Error::ResourceCap {
            what: what.into(),
            needed,
            cap,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotAdmissible { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidState(_)
            | Error::Unsupported(_)
            | Error::InvalidArgument(_) => 1,
            Error::RankMismatch { .. } | Error::Tolerance { .. } => 2,
            Error::ResourceCap { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
