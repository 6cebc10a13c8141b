use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("row span has 2^{rank} elements, above the 2^{cap} enumeration cap")]
    SpanTooLarge { rank: usize, cap: u32 },

    #[error("dense domain of {bits} bits exceeds the {cap}-bit cap")]
    DomainTooLarge { bits: usize, cap: usize },

    #[error("matrix of dimension {dim} exceeds the exact-arithmetic cap {cap}")]
    MatrixTooLarge { dim: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog code `{0}`")]
    UnknownCode(String),

    #[error("distance search exceeded the weight cap {cap}")]
    WeightCapExceeded { cap: usize },

    #[error("moment {label} is zero within tolerance; transform is singular")]
    SingularMoment { label: String },

    #[error("moment table has no entry for {label}")]
    MissingMoment { label: String },

    #[error(
        "non-positive empirical moments on rows {labels:?}; increase shots or enable clamping"
    )]
    NonPositiveMoment { labels: Vec<String> },

    #[error("moment system is rank deficient: rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("support family is not identifiable: {0}")]
    NotIdentifiable(String),

    #[error("detectability condition violated: {0}")]
    ConditionViolated(String),

    #[error("singular leading block at step {step} of the complement chain")]
    SingularBlock { step: usize },

    #[error("invalid noise model: {0}")]
    InvalidModel(String),
}
