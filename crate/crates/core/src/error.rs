use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (zero matrix, off-variety point, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A checked integer operation overflowed.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// The request exceeds a size or time budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The brute-force oracle refuses inputs that are too large to scan.
    #[error("refused: {0}")]
    Refused(String),

    #[error("zero denominator at t = {t}")]
    ZeroDenominator { t: f64 },

    #[error("rank-deficient least-squares design: {0}")]
    RankDeficient(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
