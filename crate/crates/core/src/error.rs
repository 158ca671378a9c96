use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (zero divisor, composite modulus where a prime is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value does not fit the supported integer or ambient width.
    #[error("range error: {0}")]
    Range(String),

    /// A caller-side precondition was violated (set not inside its interval,
    /// mismatched ambients, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The projected amount of work exceeds the configured ceiling.
    #[error("budget exceeded: projected {projected} > limit {limit} ({what})")]
    Budget {
        what: String,
        projected: f64,
        limit: f64,
        /// Best partial answer found before giving up, when one exists.
        best_lower_bound: Option<u64>,
    },

    /// The instance is too small for the requested procedure to run even once.
    #[error("scale error: {reason}; minimum viable size {minimum}")]
    Scale { reason: String, minimum: u64 },

    /// A post-condition that the construction guarantees failed to hold.
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn budget(what: impl Into<String>, projected: f64, limit: f64) -> Self {
        Error::Budget {
            what: what.into(),
            projected,
            limit,
            best_lower_bound: None,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
