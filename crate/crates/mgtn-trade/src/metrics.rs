//! Financial evaluation of a per-step log-return series: total return,
//! Sharpe ratio, maximum drawdown, and hit rate.

use serde::Serialize;

use crate::error::{Result, TradeError};

#[derive(Debug, Clone, Serialize)]
pub struct FinancialMetrics {
    /// Total percentage return `(exp(sum r) - 1) * 100`.
    pub total_return_pct: f64,
    /// Mean log-return over its sample standard deviation.
    pub sharpe: f64,
    /// Zero-dispersion series cannot be risk-adjusted; flagged, not failed.
    pub sharpe_degenerate: bool,
    /// Largest peak-to-trough percentage decline of the equity curve.
    pub max_drawdown_pct: f64,
    /// Percentage of held steps with strictly positive profit.
    pub hit_rate_pct: f64,
}

/// Equity path of an initial stake compounded by log-returns; length n + 1.
pub fn equity_curve(initial: f64, log_returns: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(log_returns.len() + 1);
    let mut acc = 0.0;
    out.push(initial);
    for r in log_returns {
        acc += r;
        out.push(initial * acc.exp());
    }
    out
}

/// Rolling-peak maximum drawdown of an equity path, in percent.
pub fn max_drawdown_pct(equity: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &e in equity {
        peak = peak.max(e);
        if peak > 0.0 {
            worst = worst.max((peak - e) / peak);
        }
    }
    worst * 100.0
}

pub fn financial_metrics(log_returns: &[f64]) -> Result<FinancialMetrics> {
    if log_returns.is_empty() {
        return Err(TradeError::EmptySeries);
    }
    let n = log_returns.len() as f64;
    let sum: f64 = log_returns.iter().sum();
    let mean = sum / n;
    let variance = if log_returns.len() > 1 {
        log_returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std = variance.sqrt();
    let (sharpe, degenerate) = if std > 0.0 {
        (mean / std, false)
    } else {
        (0.0, true)
    };
    let wins = log_returns.iter().filter(|&&r| r > 0.0).count();
    Ok(FinancialMetrics {
        total_return_pct: (sum.exp() - 1.0) * 100.0,
        sharpe,
        sharpe_degenerate: degenerate,
        max_drawdown_pct: max_drawdown_pct(&equity_curve(1000.0, log_returns)),
        hit_rate_pct: wins as f64 / n * 100.0,
    })
}

/// Reference routines kept deliberately naive; tests compare the fast
/// implementations against these.
pub mod reference {
    /// All-pairs peak-to-trough search, quadratic on purpose.
    pub fn max_drawdown_brute_pct(equity: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..equity.len() {
            for j in i..equity.len() {
                if equity[i] > 0.0 {
                    worst = worst.max((equity[i] - equity[j]) / equity[i]);
                }
            }
        }
        worst * 100.0
    }
}
