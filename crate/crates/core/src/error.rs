use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transition matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("row {row} sums to {sum}, outside tolerance {tol}")]
    RowNotStochastic { row: usize, sum: f64, tol: f64 },

    #[error("entry ({row},{col}) = {value} is not a probability")]
    InvalidProbability { row: usize, col: usize, value: f64 },

    #[error("supplied stationary distribution is invalid: {0}")]
    InvalidStationary(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("chain is not irreducible: {closed_classes} closed communicating classes")]
    NotIrreducible { closed_classes: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("support violation at context {context:?}, symbol {symbol}")]
    SupportViolation { context: Vec<usize>, symbol: usize },

    #[error("window length {requested} exceeds cap {cap}")]
    WindowTooLarge { requested: usize, cap: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported cost function: {0}")]
    UnsupportedCost(String),

    #[error("search space too large: {0}")]
    TooLarge(String),

    #[error("invalid rate matrix: {0}")]
    InvalidRates(String),

    #[error("state {state} has no outgoing rate; jump chain undefined")]
    AbsorbingState { state: usize },

    #[error("text is empty after preprocessing")]
    EmptyText,

    #[error("cost inequality violated (implementation bug): {0}")]
    InequalityViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether this error indicates a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotIrreducible { .. }
                | Error::Numerical(_)
                | Error::SupportViolation { .. }
                | Error::InequalityViolation(_)
        )
    }
}
