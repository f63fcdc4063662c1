use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("memory budget exceeded: {requested} amplitudes requested, limit is {limit}")]
    Budget { requested: u128, limit: usize },

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },

    #[error("basis is not orthonormal (deviation {deviation:.3e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("observable is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("optimizer stalled: every site environment vanished")]
    OptimizerStall,

    #[error("net enumeration exceeded its node budget after {explored} nodes (best overlap so far {best_so_far:.6})")]
    NetBudget { explored: u64, best_so_far: f64 },

    #[error("persistency search exceeded {explored} nodes; best upper bound found {upper_bound} (not optimal)")]
    SearchBudget { explored: u64, upper_bound: usize },

    #[error("verifier exceeded its step budget ({budget} steps)")]
    VerifierBudget { budget: u64 },

    #[error("strategy violated its contract at history {history:?}: {reason}")]
    Strategy { history: String, reason: String },

    #[error("unknown command `{0}`")]
    UnknownCommand(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by exhausting a configured resource budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. }
                | Error::NetBudget { .. }
                | Error::SearchBudget { .. }
                | Error::VerifierBudget { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
