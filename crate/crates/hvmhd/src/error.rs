use std::fmt;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parameter error: {name}: {reason}")]
    Parameter { name: String, reason: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("non-finite value at t = {t}: {what}")]
    NonFinite { t: f64, what: String },
    #[error("instability: {0}")]
    Instability(String),
    #[error("run aborted at step {step} ({last_checkpoint}): {source}")]
    Aborted {
        step: u64,
        /// Path of the last checkpoint written, or a note that none was.
        last_checkpoint: String,
        source: Box<Error>,
    },
    #[error(transparent)]
    Config(#[from] crate::io::config::ConfigError),
    #[error(transparent)]
    Checkpoint(#[from] crate::io::checkpoint::CheckpointError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(name: impl Into<String>, reason: impl fmt::Display) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.to_string(),
        }
    }

    pub fn structural(msg: impl fmt::Display) -> Self {
        Error::Structural(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
