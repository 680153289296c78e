use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("price at row {row} is not positive: {value}")]
    NonPositivePrice { row: usize, value: f64 },

    #[error("window of {window} steps plus horizon {horizon} does not fit {len} time steps")]
    WindowTooLarge {
        window: usize,
        horizon: usize,
        len: usize,
    },

    #[error("split produced an empty {0} partition")]
    EmptySplit(&'static str),

    #[error("column {0:?} not found")]
    MissingColumn(String),

    #[error("column {name:?} row {row}: {reason}")]
    BadCell {
        name: String,
        row: usize,
        reason: String,
    },

    #[error("table has no complete rows after forward fill")]
    NoCompleteRows,

    #[error("inconsistent table: {0}")]
    Inconsistent(String),

    #[error("sample set invariant violated: {0}")]
    Invariant(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] mgtn_core::CoreError),
}

pub type Result<T> = std::result::Result<T, DataError>;
