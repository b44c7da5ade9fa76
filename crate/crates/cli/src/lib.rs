//! Experiment drivers and tabular output on top of `magg-core`.

pub mod experiments;

pub use experiments::{
    cluster_error, reference_bigram_partition, run_bigram, run_maintenance, run_quasi_periodic,
    synthetic_block_corpus, BigramOutcome, ExperimentResult, MetricRow, MAX_MATCH_GROUPS,
};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] magg_core::Error),

    #[error("cluster-error matching supports at most {max} groups, got {got}")]
    TooManyGroups { got: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 2 for data errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}
