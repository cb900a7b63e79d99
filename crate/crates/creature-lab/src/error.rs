use thiserror::Error;

/// Error type shared by every operation in the workbench.
///
/// Variants map onto the CLI exit codes: `Input` is a malformed or
/// precondition-violating input (exit 2), `Guard` is a size guard trip
/// (exit 3), `Infeasible` is a negative but well-formed outcome such as an
/// infeasible split or an exceeded cap (exit 1).
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("size guard exceeded: {what} needs {needed}, limit {limit}")]
    Guard {
        what: String,
        needed: String,
        limit: u64,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub fn guard(what: impl Into<String>, needed: impl ToString, limit: u64) -> Self {
        Error::Guard {
            what: what.into(),
            needed: needed.to_string(),
            limit,
        }
    }

    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 1,
            Error::Input(_) => 2,
            Error::Guard { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
