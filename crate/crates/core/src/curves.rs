//! Flat riskfree and flat hazard-rate curves.
//!
//! Premium legs are continuous annuities, so the risky annuity over
//! `[t1, t2]` is `∫ e^{-(r+h)u} du` and the flat-curve DV01 has the closed
//! form `(1 - e^{-gτ}) / g` with `g = r + (1+ε)s/(1-R)`.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket, DEFAULT_TOL};

/// ACT/365-fixed year fraction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct YearFraction(f64);

impl YearFraction {
    pub fn new(years: f64) -> Result<Self> {
        if years.is_finite() && years >= 0.0 {
            Ok(YearFraction(years))
        } else {
            Err(Error::domain(format!("year fraction must be >= 0, got {years}")))
        }
    }

    pub fn years(self) -> f64 {
        self.0
    }
}

pub fn year_fraction(d1: NaiveDate, d2: NaiveDate) -> Result<YearFraction> {
    if d2 < d1 {
        return Err(Error::DateOrder {
            start: d1.to_string(),
            end: d2.to_string(),
        });
    }
    Ok(YearFraction((d2 - d1).num_days() as f64 / 365.0))
}

/// ∫_{t1}^{t2} e^{-g u} du, continuous through g = 0.
pub(crate) fn annuity(g: f64, t1: f64, t2: f64) -> f64 {
    e_neg(g, t1) * unit_annuity(g, t2 - t1)
}

fn e_neg(g: f64, t: f64) -> f64 {
    (-g * t).exp()
}

/// (1 - e^{-gτ}) / g with the g → 0 limit τ.
fn unit_annuity(g: f64, tau: f64) -> f64 {
    let x = g * tau;
    if x.abs() < 1e-8 {
        tau * (1.0 - 0.5 * x + x * x / 6.0)
    } else {
        -(-x).exp_m1() / g
    }
}

/// Value of a unit continuous annuity over `horizon` years on a flat curve
/// at spread `s`: `(1 - e^{-gτ}) / g`, `g = r + (1+ε)s/(1-R)`.
///
/// This is the conventional spread-to-upfront PV01; it uses the supplied
/// spread, not the curve's.
pub fn dv01_flat(spread: f64, horizon: f64, rate: f64, recovery: f64, epsilon: f64) -> f64 {
    let g = rate + (1.0 + epsilon) * spread / (1.0 - recovery);
    unit_annuity(g, horizon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CreditCurve {
    valuation_date: NaiveDate,
    rate: f64,
    spot_spread: f64,
    recovery: f64,
    epsilon: f64,
}

impl CreditCurve {
    pub fn new(valuation_date: NaiveDate, rate: f64, spot_spread: f64, recovery: f64) -> Result<Self> {
        Self::with_epsilon_unchecked(valuation_date, rate, spot_spread, recovery, 0.0).validate()
    }

    fn with_epsilon_unchecked(
        valuation_date: NaiveDate,
        rate: f64,
        spot_spread: f64,
        recovery: f64,
        epsilon: f64,
    ) -> Self {
        CreditCurve {
            valuation_date,
            rate,
            spot_spread,
            recovery,
            epsilon,
        }
    }

    fn validate(self) -> Result<Self> {
        if self.rate <= -1.0 || !self.rate.is_finite() {
            return Err(Error::domain(format!(
                "riskfree rate must exceed -1, got {}",
                self.rate
            )));
        }
        if self.spot_spread < 0.0 || !self.spot_spread.is_finite() {
            return Err(Error::domain(format!(
                "spot spread must be >= 0, got {}",
                self.spot_spread
            )));
        }
        if !(0.0..1.0).contains(&self.recovery) {
            return Err(Error::domain(format!(
                "marking recovery must lie in [0, 1), got {}",
                self.recovery
            )));
        }
        if self.epsilon < -1.0 || !self.epsilon.is_finite() {
            return Err(Error::domain(format!("epsilon must be >= -1, got {}", self.epsilon)));
        }
        Ok(self)
    }

    /// Same curve with the hazard scaled by `1 + epsilon`.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        CreditCurve { epsilon, ..*self }.validate()
    }

    pub fn valuation_date(&self) -> NaiveDate {
        self.valuation_date
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn spot_spread(&self) -> f64 {
        self.spot_spread
    }

    pub fn recovery(&self) -> f64 {
        self.recovery
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn hazard(&self) -> f64 {
        (1.0 + self.epsilon) * self.spot_spread / (1.0 - self.recovery)
    }

    /// Years from the valuation date to `date`.
    pub fn time_to(&self, date: NaiveDate) -> Result<f64> {
        Ok(year_fraction(self.valuation_date, date)?.years())
    }

    pub fn discount(&self, t: f64) -> f64 {
        e_neg(self.rate, t)
    }

    pub fn survival(&self, t: f64) -> f64 {
        e_neg(self.hazard(), t)
    }

    /// B*(t) = B(t) Q(t).
    pub fn risky_discount(&self, t: f64) -> f64 {
        e_neg(self.rate + self.hazard(), t)
    }

    pub fn dv01_flat(&self, spread: f64, horizon: f64) -> f64 {
        dv01_flat(spread, horizon, self.rate, self.recovery, self.epsilon)
    }

    /// Time-0 value of the risky annuity paid over `[t1, t2]`.
    pub fn forward_rpv01(&self, t1: f64, t2: f64) -> Result<f64> {
        check_interval(t1, t2)?;
        Ok(annuity(self.rate + self.hazard(), t1, t2))
    }

    /// Protection leg PV for defaults in `[t1, t2]`.
    pub fn default_pv(&self, t1: f64, t2: f64) -> Result<f64> {
        let h = self.hazard();
        Ok((1.0 - self.recovery) * h * self.forward_rpv01(t1, t2)?)
    }

    pub fn forward_par_spread(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t2 > t1) {
            return Err(Error::DegenerateInterval(t1, t2));
        }
        Ok(self.default_pv(t1, t2)? / self.forward_rpv01(t1, t2)?)
    }
}

fn check_interval(t1: f64, t2: f64) -> Result<()> {
    if t1 >= 0.0 && t2 >= t1 && t2.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("need 0 <= t1 <= t2, got [{t1}, {t2}]")))
    }
}

/// Flat riskfree rate reproducing a target forward RPV01 for a flat curve
/// at spread `s0` and recovery `recovery`; searched on (-0.5, 1).
pub fn calibrate_flat_rate(target_rpv01: f64, s0: f64, recovery: f64, t1: f64, t2: f64) -> Result<f64> {
    check_interval(t1, t2)?;
    if !(0.0..1.0).contains(&recovery) || !(s0 >= 0.0) {
        return Err(Error::domain("calibrate_flat_rate needs s0 >= 0 and 0 <= R < 1"));
    }
    let h = s0 / (1.0 - recovery);
    let f = |r: f64| annuity(r + h, t1, t2) - target_rpv01;
    find_root(f, Bracket::new(-0.5, 1.0)?, DEFAULT_TOL * 1e-2)
}
