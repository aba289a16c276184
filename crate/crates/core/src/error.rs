use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Invalid or mutually inconsistent parameters (ring degree, modulus, bounds).
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("fewer shares than the threshold: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },

    /// A protocol round collected fewer than `T` participants; the session aborts.
    #[error("round {round}: {got} participants, threshold is {needed}")]
    InsufficientParticipants { round: usize, needed: usize, got: usize },

    #[error("protocol state error: {0}")]
    ProtocolState(String),

    #[error("ciphertext combination error: {0}")]
    Combine(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("setup error: {0}")]
    Setup(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
