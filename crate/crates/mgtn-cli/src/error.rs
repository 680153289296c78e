use thiserror::Error;

/// Top-level failures mapped to process exit codes: configuration problems
/// exit 2, data problems exit 3, numeric failures exit 4.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(#[from] mgtn_data::DataError),

    #[error("numeric error: {0}")]
    Core(#[from] mgtn_core::CoreError),

    #[error("numeric error: {0}")]
    Trade(#[from] mgtn_trade::TradeError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Io(_) => 3,
            CliError::Core(_) | CliError::Trade(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
