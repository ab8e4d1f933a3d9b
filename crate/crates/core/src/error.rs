use thiserror::Error;

/// Library-wide error type.
///
/// Variants are grouped by the process exit code they map to: claim or
/// verification failures exit 1, malformed input exits 2, cap violations
/// exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An element does not belong to the descriptor it was used with.
    #[error("element/descriptor mismatch: {0}")]
    Mismatch(String),

    /// The operation does not support this group kind.
    #[error("unsupported group kind for {op}: {kind}")]
    UnsupportedKind { op: &'static str, kind: &'static str },

    /// A configured resource limit was exceeded.
    #[error("{what} cap exceeded: {got} exceeds limit {limit}")]
    CapExceeded {
        what: String,
        got: String,
        limit: String,
    },

    /// Invalid caller-supplied data (bad word, non-bijective images, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A JSON document does not match the expected schema.
    #[error("malformed document: {0}")]
    Malformed(String),

    /// A document carries a format version this build does not understand.
    #[error("unsupported format version {got} (this build reads version {expected})")]
    FormatVersion { got: i64, expected: i64 },

    /// An internal consistency check failed while building an artifact.
    #[error("verification failed: {0}")]
    Verification(String),

    /// One or more certificate claims did not hold.
    #[error("claims failed: {0}")]
    ClaimsFailed(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable exit-code contract: 0 success, 1 claim failure, 2 input or
    /// format error, 3 cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ClaimsFailed(_) | Error::Verification(_) => 1,
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
