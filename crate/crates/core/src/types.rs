use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payer (buy protection) or receiver (sell protection).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Payer,
    Receiver,
}

impl Side {
    /// +1 for payer, -1 for receiver.
    pub fn sign(self) -> f64 {
        match self {
            Side::Payer => 1.0,
            Side::Receiver => -1.0,
        }
    }
}

/// Lognormal volatility per square-root year.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Vol(f64);

impl Vol {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(Vol(sigma))
        } else {
            Err(Error::domain(format!("volatility must be positive, got {sigma}")))
        }
    }

    pub fn sigma(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Vol {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Vol::new(v)
    }
}

impl From<Vol> for f64 {
    fn from(v: Vol) -> f64 {
        v.0
    }
}

/// Premium plus the intermediate quantities that produced it.
///
/// `d_plus`/`d_minus` are only set by closed-form (Black-76) pricers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceResult {
    pub premium: f64,
    pub forward: f64,
    pub d_plus: Option<f64>,
    pub d_minus: Option<f64>,
    pub delta: f64,
    pub epsilon_used: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl PriceResult {
    pub(crate) fn with_diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}
