//! CDS index options priced as options on the fully-funded protection PV.
//!
//! The payer's exercise value is `X_{t_E} − Y_{t_E}` where `X` bundles the
//! realised loss, the upfront value of the surviving index and a riskfree
//! coupon annuity, and `Y` is the strike leg plus the same annuity. Both are
//! positive PVs, so Black-76 on `X̃/Ỹ` prices the option, and nothing
//! special happens when every name has defaulted.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::black::black76;
use crate::curves::{dv01_flat, year_fraction};
use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket};
use crate::types::{PriceResult, Side, Vol};

/// Market quote for the underlying index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexQuote {
    /// Flat spread (decimal), investment-grade convention.
    Spread(f64),
    /// Price per 100 of notional, high-yield convention.
    Price(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexStrike {
    /// Strike spread, settled through the flat-curve DV01 at that spread.
    Spread(f64),
    /// Upfront strike as a fraction of notional; negative above par.
    Upfront(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexState {
    /// Names in the original index.
    pub n00: u32,
    /// Names alive when the option was struck.
    pub n0: u32,
    /// Names alive at valuation.
    pub nt: u32,
    /// Loss since the strike date as a fraction of original notional.
    #[serde(default)]
    pub loss: f64,
    pub coupon: f64,
    pub quote: IndexQuote,
    pub recovery: f64,
    pub rate: f64,
    pub strike_date: NaiveDate,
    pub valuation_date: NaiveDate,
    pub expiry: NaiveDate,
    pub maturity: NaiveDate,
    /// Dates of the `n0 − nt` defaults since the strike date, if known.
    #[serde(default)]
    pub default_dates: Vec<NaiveDate>,
}

/// Times in years from the strike date.
#[derive(Debug, Clone, Copy)]
struct Times {
    t: f64,
    t_e: f64,
    t_m: f64,
}

impl IndexState {
    pub fn validate(&self) -> Result<()> {
        if !(self.n00 >= self.n0 && self.n0 >= self.nt) || self.n0 == 0 {
            return Err(Error::domain(format!(
                "need n00 >= n0 >= nt and n0 > 0, got {} / {} / {}",
                self.n00, self.n0, self.nt
            )));
        }
        let max_loss = (self.n00 - self.nt) as f64 / self.n00 as f64;
        if !(self.loss >= 0.0 && self.loss <= max_loss) {
            return Err(Error::domain(format!(
                "loss must lie in [0, {max_loss}], got {}",
                self.loss
            )));
        }
        if self.nt == self.n0 && self.loss != 0.0 {
            return Err(Error::domain(
                "loss must be zero when no name has defaulted since the strike date",
            ));
        }
        if self.coupon < 0.0 || !self.coupon.is_finite() {
            return Err(Error::domain(format!("coupon must be >= 0, got {}", self.coupon)));
        }
        if !(0.0..1.0).contains(&self.recovery) {
            return Err(Error::domain(format!(
                "marking recovery must lie in [0, 1), got {}",
                self.recovery
            )));
        }
        if self.rate <= -1.0 || !self.rate.is_finite() {
            return Err(Error::domain(format!(
                "riskfree rate must exceed -1, got {}",
                self.rate
            )));
        }
        match self.quote {
            IndexQuote::Spread(s) if s < 0.0 || !s.is_finite() => {
                return Err(Error::domain(format!("index spread must be >= 0, got {s}")));
            }
            IndexQuote::Price(p) if !p.is_finite() => {
                return Err(Error::domain(format!("index price must be finite, got {p}")));
            }
            _ => {}
        }
        year_fraction(self.strike_date, self.valuation_date)?;
        year_fraction(self.valuation_date, self.expiry)?;
        if self.expiry >= self.maturity {
            return Err(Error::DateOrder {
                start: self.maturity.to_string(),
                end: self.expiry.to_string(),
            });
        }
        if !self.default_dates.is_empty() {
            if self.default_dates.len() != (self.n0 - self.nt) as usize {
                return Err(Error::domain(format!(
                    "expected {} default dates, got {}",
                    self.n0 - self.nt,
                    self.default_dates.len()
                )));
            }
            for &d in &self.default_dates {
                year_fraction(self.strike_date, d)?;
                year_fraction(d, self.valuation_date)?;
            }
        }
        Ok(())
    }

    fn times(&self) -> Result<Times> {
        self.validate()?;
        Ok(Times {
            t: year_fraction(self.strike_date, self.valuation_date)?.years(),
            t_e: year_fraction(self.strike_date, self.expiry)?.years(),
            t_m: year_fraction(self.strike_date, self.maturity)?.years(),
        })
    }

    fn dv01(&self, spread: f64, horizon: f64) -> f64 {
        dv01_flat(spread, horizon, self.rate, self.recovery, 0.0)
    }

    fn factor(&self) -> f64 {
        self.nt as f64 / self.n00 as f64
    }

    fn strike_factor(&self) -> f64 {
        self.n0 as f64 / self.n00 as f64
    }

    /// Coupon accrued on defaulted names since default, rolled at `r` to `t`,
    /// per name alive at the strike date.
    fn accrual(&self, t: f64) -> Result<f64> {
        let roll = |age: f64| {
            let x = self.rate * age;
            if x.abs() < 1e-10 {
                age
            } else {
                x.exp_m1() / self.rate
            }
        };
        let ages: Vec<f64> = if self.default_dates.is_empty() {
            vec![0.5 * t; (self.n0 - self.nt) as usize]
        } else {
            self.default_dates
                .iter()
                .map(|&d| Ok(year_fraction(d, self.valuation_date)?.years()))
                .collect::<Result<_>>()?
        };
        Ok(ages.into_iter().map(roll).sum::<f64>() / self.n0 as f64)
    }

    /// Upfront per unit notional of the surviving index at valuation.
    fn upfront(&self, tm: f64) -> f64 {
        match self.quote {
            IndexQuote::Spread(s) => (s - self.coupon) * self.dv01(s, tm),
            IndexQuote::Price(p) => price_to_upfront(p),
        }
    }

    /// Flat spread implied by the quote, used for the survival probability.
    pub fn flat_spread(&self) -> Result<f64> {
        let tm = self.times()?;
        match self.quote {
            IndexQuote::Spread(s) => Ok(s),
            IndexQuote::Price(p) => {
                let u = price_to_upfront(p);
                let f = |s: f64| (s - self.coupon) * self.dv01(s, tm.t_m - tm.t) - u;
                find_root(f, Bracket::new(0.0, 100.0)?, 1e-14)
            }
        }
    }

    fn strike_leg(&self, strike: IndexStrike, horizon: f64) -> f64 {
        match strike {
            IndexStrike::Spread(k) => (k - self.coupon) * self.dv01(k, horizon),
            IndexStrike::Upfront(u) => u,
        }
    }
}

/// `(100 − price)/100`: a price of 97.625 means 2.375% upfront.
pub fn price_to_upfront(price: f64) -> f64 {
    (100.0 - price) / 100.0
}

/// Flat-curve DV01 at spread `s` over the forward swap's life; converts a
/// spread strike into an upfront amount.
pub fn settlement_dv01(s: f64, state: &IndexState) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("spread must be >= 0, got {s}")));
    }
    let tm = state.times()?;
    Ok(state.dv01(s, tm.t_m - tm.t_e))
}

/// Fully-funded protection PV `X̃_t`.
pub fn x_tilde(state: &IndexState) -> Result<f64> {
    let tm = state.times()?;
    let w = state.accrual(tm.t)? + state.dv01(0.0, tm.t_m - tm.t);
    Ok(state.loss + state.factor() * state.upfront(tm.t_m - tm.t) + state.coupon * state.strike_factor() * w)
}

/// Fully-funded strike PV `Ỹ_t`.
pub fn y_tilde(state: &IndexState, strike: IndexStrike) -> Result<f64> {
    let tm = state.times()?;
    let b = (-state.rate * (tm.t_e - tm.t)).exp();
    let h = state.flat_spread()? / (1.0 - state.recovery);
    let q = (-h * (tm.t_e - tm.t)).exp();
    let alive = state.nt as f64 / state.n0 as f64;
    let writedown = state.accrual(tm.t)? + (1.0 - alive) * state.dv01(0.0, tm.t_e - tm.t) + alive * 0.5 * (1.0 - q);
    let tail = state.dv01(0.0, tm.t_m - tm.t_e);
    let leg = state.strike_leg(strike, tm.t_m - tm.t_e);
    Ok(state.strike_factor() * (b * leg + state.coupon * writedown + state.coupon * b * tail))
}

fn black_inputs(state: &IndexState, strike: IndexStrike) -> Result<(f64, f64, f64)> {
    let tm = state.times()?;
    if !(tm.t_e > tm.t) {
        return Err(Error::domain("index option valuation must be before expiry"));
    }
    let x = x_tilde(state)?;
    let y = y_tilde(state, strike)?;
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Construction(format!(
            "X̃ = {x:e}, Ỹ = {y:e}; both must be positive"
        )));
    }
    Ok((x, y, tm.t_e - tm.t))
}

/// Black-76 on `X̃/Ỹ` with PV volatility `vol`.
pub fn price_index_option(state: &IndexState, strike: IndexStrike, vol: Vol, side: Side) -> Result<PriceResult> {
    let (x, y, dt) = black_inputs(state, strike)?;
    let b = black76(x, y, vol.sigma() * dt.sqrt(), side)?;
    Ok(PriceResult {
        premium: b.value,
        forward: x,
        d_plus: Some(b.d_plus),
        d_minus: Some(b.d_minus),
        delta: b.delta(side),
        epsilon_used: 0.0,
        diagnostics: Default::default(),
    }
    .with_diag("x_tilde", x)
    .with_diag("y_tilde", y))
}

/// Price-quoted index with an upfront strike.
pub fn price_index_option_hy(state: &IndexState, upfront_strike: f64, vol: Vol, side: Side) -> Result<PriceResult> {
    if !matches!(state.quote, IndexQuote::Price(_)) {
        return Err(Error::domain("price-quoted pricing needs a price quote"));
    }
    price_index_option(state, IndexStrike::Upfront(upfront_strike), vol, side)
}

const VOL_LO: f64 = 1e-10;
const VOL_HI: f64 = 50.0;

/// PV volatility reproducing `premium`.
pub fn implied_pv_vol(state: &IndexState, strike: IndexStrike, premium: f64, side: Side) -> Result<Vol> {
    let (x, y, dt) = black_inputs(state, strike)?;
    let (intrinsic, cap) = match side {
        Side::Payer => ((x - y).max(0.0), x),
        Side::Receiver => ((y - x).max(0.0), y),
    };
    if !(premium > intrinsic) {
        return Err(Error::Bounds {
            bound: "intrinsic",
            premium,
            value: intrinsic,
        });
    }
    if !(premium < cap) {
        return Err(Error::Bounds {
            bound: "cap",
            premium,
            value: cap,
        });
    }
    let f = |s: f64| {
        black76(x, y, s * dt.sqrt(), side)
            .map(|b| b.value - premium)
            .unwrap_or(f64::NAN)
    };
    let sigma = find_root(f, Bracket::new(VOL_LO, VOL_HI)?, 1e-15)?;
    Vol::new(sigma)
}

/// Exercise value at expiry. `state` must be valued on its expiry date and
/// its quote is the index level prevailing then.
pub fn exercise_value(state: &IndexState, strike: IndexStrike, side: Side) -> Result<f64> {
    let tm = state.times()?;
    if state.valuation_date != state.expiry {
        return Err(Error::domain("exercise value needs a state valued at expiry"));
    }
    let tau = tm.t_m - tm.t_e;
    let x = state.loss + state.factor() * state.upfront(tau);
    let y = state.strike_factor() * state.strike_leg(strike, tau);
    Ok((side.sign() * (x - y)).max(0.0))
}
