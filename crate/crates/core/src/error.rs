use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("table must have at least one slot")]
    EmptyTable,

    #[error("arity must be at least 2, got {0}")]
    ArityTooSmall(u32),

    #[error("element {0} is already present")]
    DuplicateElement(u64),

    #[error("hash index {index} out of range 1..={arity}")]
    HashIndexOutOfRange { index: u32, arity: u32 },

    #[error(
        "no tabulated load threshold for d = {0} (tabulated for 2..=7; \
         for larger d the threshold approaches 1 - e^-d)"
    )]
    UnknownThreshold(u32),

    #[error("exhaustive search supports at most {max} left vertices, got {n}")]
    TooLargeForExhaustive { n: usize, max: usize },

    #[error("work budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("oracle covers a <= {a_max}; requested ({a}, {b})")]
    StirlingOutOfBounds { a: usize, b: usize, a_max: usize },

    #[error("asymptotic surjection count needs a/b > 1, got {0}")]
    DegenerateRatio(f64),

    #[error("growth schedule stalls at step {step}: penalty {penalty:.4} >= d - 2")]
    ScheduleStalled { step: usize, penalty: f64 },

    #[error("no distance cutoff M leaves at most a {alpha} fraction of elements far from a free slot")]
    NoDistanceCutoff { alpha: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed graph text at line {line}: {reason}")]
    GraphFormat { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
