//! Undiscounted Black-76 on a lognormal forward.

use crate::error::{Error, Result};
use crate::numerics::norm_cdf;
use crate::types::Side;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackValue {
    pub value: f64,
    pub d_plus: f64,
    pub d_minus: f64,
}

impl BlackValue {
    /// dValue/dForward.
    pub fn delta(&self, side: Side) -> f64 {
        match side {
            Side::Payer => norm_cdf(self.d_plus),
            Side::Receiver => -norm_cdf(-self.d_plus),
        }
    }
}

/// `F Φ(d+) − K Φ(d−)` for a payer, `K Φ(−d−) − F Φ(−d+)` for a receiver,
/// with `d± = (ln(F/K) ± ½ v²)/v` and `v` the total standard deviation.
///
/// A zero forward is allowed (the lognormal collapses at 0).
pub fn black76(forward: f64, strike: f64, total_sd: f64, side: Side) -> Result<BlackValue> {
    if strike <= 0.0 || !strike.is_finite() {
        return Err(Error::Strike(format!("Black-76 needs a positive strike, got {strike}")));
    }
    if forward < 0.0 || !forward.is_finite() {
        return Err(Error::domain(format!(
            "Black-76 needs a nonnegative forward, got {forward}"
        )));
    }
    if total_sd <= 0.0 || !total_sd.is_finite() {
        return Err(Error::domain(format!(
            "Black-76 needs positive total volatility, got {total_sd}"
        )));
    }
    let m = (forward / strike).ln();
    let d_plus = m / total_sd + 0.5 * total_sd;
    let d_minus = d_plus - total_sd;
    let value = match side {
        Side::Payer => forward * norm_cdf(d_plus) - strike * norm_cdf(d_minus),
        Side::Receiver => strike * norm_cdf(-d_minus) - forward * norm_cdf(-d_plus),
    };
    Ok(BlackValue {
        value: value.max(0.0),
        d_plus,
        d_minus,
    })
}
