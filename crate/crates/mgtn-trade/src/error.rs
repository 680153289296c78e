use thiserror::Error;

#[derive(Debug, Error)]
pub enum TradeError {
    #[error("episode is finished; reset before stepping")]
    EpisodeDone,

    #[error("action {action} out of range (environment has {count} actions)")]
    BadAction { action: usize, count: usize },

    #[error("market environment needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("currency index {index} out of range for {count} target entries")]
    BadCurrency { index: usize, count: usize },

    #[error("replay buffer holds {len} transitions, need {need} to sample")]
    BufferTooSmall { len: usize, need: usize },

    #[error("metrics need a non-empty series")]
    EmptySeries,

    #[error(transparent)]
    Core(#[from] mgtn_core::CoreError),
}

pub type Result<T> = std::result::Result<T, TradeError>;
