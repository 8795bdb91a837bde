use thiserror::Error;

/// Errors raised by the library.
///
/// The three variants map onto the CLI exit codes (2, 3 and 4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed scenario file, unknown key or unparsable quantity.
    #[error("configuration error: {0}")]
    Config(String),

    /// A quantity outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to converge or factorize.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Domain(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
