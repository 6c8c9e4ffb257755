use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("input error: {0}")]
    Input(String),

    /// A data file could not be parsed.
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    /// A non-finite value showed up during a run.
    #[error("non-finite value at iteration {iter}: {detail}")]
    NonFinite { iter: usize, detail: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
