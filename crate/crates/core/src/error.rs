use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the operation's domain (bad index, arity, shape, universe).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("subset budget of {cap} exhausted; {remaining} subsets remaining")]
    Budget { cap: u64, remaining: u64 },

    #[error("overflow at layer {layer}, node {node} on input {input}: value {value} outside the {bit_width}-bit range")]
    Overflow {
        layer: usize,
        node: usize,
        input: usize,
        value: i64,
        bit_width: u32,
    },

    /// A floating-point computation produced a result that failed its own check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
