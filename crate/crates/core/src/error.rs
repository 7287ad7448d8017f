use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested quadratic irrationality is actually rational.
    #[error("{d} is a perfect square; (p0+sqrt(d))/q0 would be rational")]
    Irrationality { d: u64 },

    /// An iteration or precision budget ran out before the result was certain.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A numerical check failed where exactness was promised.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A configuration document failed validation; `field` points at the culprit.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for validation, 3 for budget/numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Irrationality { .. } | Error::Config { .. } => 2,
            Error::Budget(_) | Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
