use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumerating routine was asked to handle more goods (or edges) than it supports.
    #[error("{what}: size {got} exceeds limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    /// A brute-force enumeration would visit more states than the configured budget.
    #[error("enumeration of {states} states exceeds budget {budget}")]
    BudgetExceeded { states: u128, budget: u64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("generalized mean of an empty list")]
    EmptyInput,

    #[error("matching has {size} edges, a perfect matching needs {q}")]
    NotPerfect { size: usize, q: usize },

    #[error("root bracket [{lo}, {hi}] has no sign change")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
