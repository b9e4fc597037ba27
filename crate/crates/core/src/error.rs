use thiserror::Error;

/// Error type shared by every numerical module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Tabulated families carry their values as a table and have no pointwise
    /// evaluator.
    #[error("tabulated activation families cannot be evaluated pointwise")]
    UnsupportedFamily,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported exponent p={0}: only p in {{1, 2}} is implemented")]
    UnsupportedExponent(u32),

    #[error("block misalignment: {0}")]
    Alignment(String),

    #[error("measure carries weight {weight} on atom {atom} outside every partition block")]
    NotAbsolutelyContinuous { atom: usize, weight: f64 },

    #[error("target is not representable: least-squares residual {residual:.3e}")]
    NotRepresentable { residual: f64 },

    #[error("unsupported loss for this operation: {0}")]
    UnsupportedLoss(&'static str),

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("partition does not cover the grid: atom {0} is unassigned")]
    PartitionNotCovering(usize),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
