use thiserror::Error;

/// Errors produced by the simulator and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image format error: {0}")]
    Format(String),
    #[error("invalid parameter `{key}`: {msg}")]
    Param { key: String, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("could not place body {index} after {attempts} attempts")]
    Capacity { index: usize, attempts: usize },
    #[error("unknown {kind} `{name}` (expected one of: {expected})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        expected: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(key: &str, msg: impl Into<String>) -> Error {
    Error::Param {
        key: key.to_string(),
        msg: msg.into(),
    }
}
