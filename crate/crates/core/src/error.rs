use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration (lattice too large, bad grid, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to converge within its budget.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// An internal consistency check failed.
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Json(_) | Error::Io(_) => 1,
            Error::Numerical(_) => 2,
            Error::Invariant(_) => 3,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        {
            let ok: bool = $cond;
            if !ok {
                return Err($crate::error::Error::$variant(format!($($arg)+)));
            }
        }
    };
}

pub(crate) use ensure;
