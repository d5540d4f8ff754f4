use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch: expected element of {expected}, got element of {found}")]
    GroupMismatch { expected: String, found: String },

    #[error("invalid {group} element: {reason}")]
    InvalidElement { group: String, reason: String },

    #[error("index {index} out of range for {group} of order {order}")]
    IndexOutOfRange {
        group: String,
        index: u64,
        order: u64,
    },

    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("cannot parse group spec {spec:?}: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("enumeration of {group} refused: order {order} exceeds cap {cap}")]
    EnumerationCap { group: String, order: u64, cap: u64 },

    #[error("operation requires an abelian group, {0} is not abelian")]
    NonAbelian(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("query budget exceeded for oracle {oracle} (limit {limit})")]
    BudgetExceeded { oracle: String, limit: u64 },

    #[error("oracle {0} is not available in this game")]
    MissingOracle(String),

    #[error("decryption oracle refused the challenge ciphertext")]
    Refused,

    #[error("repeated query to {oracle} oracle on {input}")]
    RepeatedQuery { oracle: String, input: u64 },

    #[error("no admissible answer remains for this query")]
    Exhausted,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
