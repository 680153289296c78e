//! Price-series feature helpers.

use crate::error::{DataError, Result};

/// Log difference of successive prices; output has length `n - 1`.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    for (row, &p) in prices.iter().enumerate() {
        if p.is_nan() || p <= 0.0 {
            return Err(DataError::NonPositivePrice { row, value: p });
        }
    }
    Ok(prices
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_prices_give_zero_returns() {
        let r = log_returns(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn unit_to_e_gives_one() {
        let r = log_returns(&[1.0, std::f64::consts::E]).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_move_hand_value() {
        let r = log_returns(&[100.0, 101.0]).unwrap();
        assert!((r[0] - 0.00995).abs() < 5e-5, "{}", r[0]);
    }

    #[test]
    fn non_positive_price_errors_with_row() {
        let err = log_returns(&[1.0, 2.0, 0.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = log_returns(&[1.0, -0.5]).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }
}
