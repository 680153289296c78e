//! Deep value-based trading: a market environment over windowed return
//! tensors, experience replay, the training loop, and financial metrics.

pub mod dqn;
pub mod env;
pub mod error;
pub mod metrics;
pub mod replay;

pub use dqn::{dqn_train, evaluate_greedy, DqnConfig, DqnOutcome, EpisodeLog};
pub use env::{Environment, MarketEnv, Step, ToyEnv, ACTION_BUY, ACTION_SELL};
pub use error::{Result, TradeError};
pub use metrics::{equity_curve, financial_metrics, max_drawdown_pct, FinancialMetrics};
pub use replay::{ReplayBuffer, Transition};
