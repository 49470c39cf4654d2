use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed an argument outside the operation's domain
    /// (out-of-range id, malformed permutation, non-finite number).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The inputs are well formed but the operation's precondition does not
    /// hold (for example, supporting prices requested for a non-optimal
    /// allocation).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The question has no answer in the model (for example, an optimal
    /// offer requested when the agent has no motive to trade).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {what} is {actual}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    /// An internal invariant was breached. Should never happen.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
