//! Single-name CDS options.
//!
//! The forward par spread is lognormal in the survival measure. All-running
//! strikes price in closed form (Black-76 times the forward annuity). Strikes
//! with an upfront part, and quoted-spread contracts with a fixed coupon,
//! are priced by Gaussian quadrature after calibrating the flat-curve hazard
//! scaling ε so that the annuity numeraire is consistent with the forward
//! risky discount factor.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::black::black76;
use crate::curves::CreditCurve;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_gaussian, integrate_gaussian_range, Bracket, QuadratureRule};
use crate::recovery::{default_weight, RecoveryOptionKind, RecoveryParams};
use crate::types::{PriceResult, Side, Vol};

/// Which spread sets the DV01 of the strike leg of a quoted-spread contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrikeLegConvention {
    /// Quoted spread prevailing at expiry.
    SpotAtExpiry,
    /// The strike spread itself.
    #[default]
    StrikeSpread,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub expiry: NaiveDate,
    pub maturity: NaiveDate,
    pub strike_running: f64,
    #[serde(default)]
    pub strike_upfront: f64,
    pub side: Side,
    #[serde(default = "default_true")]
    pub knockout: bool,
    #[serde(default)]
    pub coupon: f64,
    #[serde(default)]
    pub strike_leg_convention: StrikeLegConvention,
}

fn default_true() -> bool {
    true
}

impl OptionSpec {
    /// Knockout option with an all-running strike and no coupon.
    pub fn running(expiry: NaiveDate, maturity: NaiveDate, strike: f64, side: Side) -> Self {
        OptionSpec {
            expiry,
            maturity,
            strike_running: strike,
            strike_upfront: 0.0,
            side,
            knockout: true,
            coupon: 0.0,
            strike_leg_convention: StrikeLegConvention::default(),
        }
    }

    pub fn with_upfront(self, strike_upfront: f64) -> Self {
        OptionSpec { strike_upfront, ..self }
    }

    pub fn with_side(self, side: Side) -> Self {
        OptionSpec { side, ..self }
    }

    pub fn with_knockout(self, knockout: bool) -> Self {
        OptionSpec { knockout, ..self }
    }

    pub fn with_coupon(self, coupon: f64, convention: StrikeLegConvention) -> Self {
        OptionSpec {
            coupon,
            strike_leg_convention: convention,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.expiry >= self.maturity {
            return Err(Error::DateOrder {
                start: self.maturity.to_string(),
                end: self.expiry.to_string(),
            });
        }
        let (s, u) = (self.strike_running, self.strike_upfront);
        if s < 0.0 || !s.is_finite() {
            return Err(Error::Strike(format!("running strike must be >= 0, got {s}")));
        }
        if u < 0.0 || !u.is_finite() {
            return Err(Error::Strike(format!("upfront strike must be >= 0, got {u}")));
        }
        if s == 0.0 && u == 0.0 {
            return Err(Error::Strike("running and upfront strike are both zero".into()));
        }
        if self.coupon < 0.0 || !self.coupon.is_finite() {
            return Err(Error::domain(format!("coupon must be >= 0, got {}", self.coupon)));
        }
        Ok(())
    }
}

/// Quantities shared by every pricer for one (curve, spec).
#[derive(Debug, Clone, Copy)]
struct Setup {
    t_e: f64,
    tau: f64,
    annuity: f64,
    forward: f64,
}

fn setup(curve: &CreditCurve, spec: &OptionSpec) -> Result<Setup> {
    spec.validate()?;
    let t_e = curve.time_to(spec.expiry)?;
    let t = curve.time_to(spec.maturity)?;
    if !(t_e > 0.0) {
        return Err(Error::domain("option expiry must be after the valuation date"));
    }
    Ok(Setup {
        t_e,
        tau: t - t_e,
        annuity: curve.forward_rpv01(t_e, t)?,
        forward: curve.forward_par_spread(t_e, t)?,
    })
}

/// Lognormal spread at expiry for standard normal `z`.
fn spread_at(forward: f64, sd: f64, z: f64) -> f64 {
    forward * (sd * z - 0.5 * sd * sd).exp()
}

pub fn price_ko_running(curve: &CreditCurve, spec: &OptionSpec, vol: Vol) -> Result<PriceResult> {
    let s = setup(curve, spec)?;
    if spec.strike_upfront != 0.0 {
        return Err(Error::Strike("closed-form pricing needs an all-running strike".into()));
    }
    let sd = vol.sigma() * s.t_e.sqrt();
    let b = black76(s.forward, spec.strike_running, sd, spec.side)?;
    Ok(PriceResult {
        premium: b.value * s.annuity,
        forward: s.forward,
        d_plus: Some(b.d_plus),
        d_minus: Some(b.d_minus),
        delta: b.delta(spec.side),
        epsilon_used: curve.epsilon(),
        diagnostics: Default::default(),
    }
    .with_diag("annuity", s.annuity))
}

/// No-knockout: a payer also owns the front-end protection; a receiver
/// would never exercise into a defaulted name and equals the knockout.
pub fn price_nko_running(curve: &CreditCurve, spec: &OptionSpec, vol: Vol) -> Result<PriceResult> {
    let ko = price_ko_running(curve, spec, vol)?;
    let fep = curve.default_pv(0.0, curve.time_to(spec.expiry)?)?;
    Ok(match spec.side {
        Side::Payer => PriceResult {
            premium: ko.premium + fep,
            ..ko
        },
        Side::Receiver => ko,
    }
    .with_diag("fep", fep))
}

/// ∫ φ(z) / DV01_ε(s̄(z)) dz − target.
fn epsilon_objective(
    curve: &CreditCurve,
    s: &Setup,
    sd: f64,
    rule: &QuadratureRule,
    eps: f64,
    target: f64,
) -> Result<f64> {
    let (r, rec, fwd, tau) = (curve.rate(), curve.recovery(), s.forward, s.tau);
    let lhs = integrate_gaussian(
        |z| 1.0 / crate::curves::dv01_flat(spread_at(fwd, sd, z), tau, r, rec, eps),
        rule,
    )?;
    Ok(lhs - target)
}

/// ε making `∫ φ(z)/DV01_ε(s̄(z)) dz = B*(t_E)/V¹₀` on `rule`.
pub fn calibrate_epsilon(
    curve: &CreditCurve,
    expiry: NaiveDate,
    maturity: NaiveDate,
    vol: Vol,
    rule: &QuadratureRule,
) -> Result<f64> {
    let s = setup_dates(curve, expiry, maturity)?;
    calibrate_inner(curve, &s, vol, rule, curve.risky_discount(s.t_e) / s.annuity)
}

/// As [`calibrate_epsilon`] but matching an externally supplied forward
/// annuity `target_annuity` in place of the curve's own.
pub fn calibrate_epsilon_to_annuity(
    curve: &CreditCurve,
    expiry: NaiveDate,
    maturity: NaiveDate,
    vol: Vol,
    rule: &QuadratureRule,
    target_annuity: f64,
) -> Result<f64> {
    if !(target_annuity > 0.0) {
        return Err(Error::domain(format!(
            "target annuity must be positive, got {target_annuity}"
        )));
    }
    let s = setup_dates(curve, expiry, maturity)?;
    calibrate_inner(curve, &s, vol, rule, curve.risky_discount(s.t_e) / target_annuity)
}

/// Residual of the calibration condition at a given ε.
pub fn epsilon_residual(
    curve: &CreditCurve,
    expiry: NaiveDate,
    maturity: NaiveDate,
    vol: Vol,
    rule: &QuadratureRule,
    eps: f64,
) -> Result<f64> {
    let s = setup_dates(curve, expiry, maturity)?;
    let sd = vol.sigma() * s.t_e.sqrt();
    epsilon_objective(curve, &s, sd, rule, eps, curve.risky_discount(s.t_e) / s.annuity)
}

fn setup_dates(curve: &CreditCurve, expiry: NaiveDate, maturity: NaiveDate) -> Result<Setup> {
    let spec = OptionSpec::running(expiry, maturity, 1.0, Side::Payer);
    setup(curve, &spec)
}

const EPS_HI_MAX: f64 = 1e6;

fn calibrate_inner(curve: &CreditCurve, s: &Setup, vol: Vol, rule: &QuadratureRule, target: f64) -> Result<f64> {
    if s.forward == 0.0 {
        // DV01 no longer depends on ε
        return Ok(curve.epsilon());
    }
    let sd = vol.sigma() * s.t_e.sqrt();
    let f = |e: f64| epsilon_objective(curve, s, sd, rule, e, target);
    let lo = -1.0;
    let f_lo = f(lo)?;
    let mut hi = 1.0;
    let mut f_hi = f(hi)?;
    while f_hi < 0.0 && hi < EPS_HI_MAX {
        hi *= 4.0;
        f_hi = f(hi)?;
    }
    let fail = || Error::Calibration {
        lo,
        hi,
        lo_residual: f_lo,
        hi_residual: f_hi,
    };
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(fail());
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    // the objective is monotone, so the only failure mode is numerical
    let g = |e: f64| f(e).unwrap_or(f64::NAN);
    find_root(g, Bracket::new(lo, hi)?, 1e-14).map_err(|_| fail())
}

/// Premium and exercise boundary of `V¹₀ ∫ (±payoff(s(z)))⁺ φ(z) dz`, where
/// `payoff` is increasing in the spread.
fn integrate_payoff(
    payoff: impl Fn(f64) -> f64,
    forward: f64,
    sd: f64,
    side: Side,
    rule: &QuadratureRule,
) -> Result<(f64, Option<f64>)> {
    let zb = rule.z_bound();
    let g = |z: f64| payoff(spread_at(forward, sd, z));
    let (g_lo, g_hi) = (g(-zb), g(zb));
    let boundary = if g_lo < 0.0 && g_hi > 0.0 {
        Some(find_root(g, Bracket::new(-zb, zb)?, 1e-13)?)
    } else {
        None
    };
    let (lo, hi) = match (side, boundary) {
        (Side::Payer, Some(z)) => (z, f64::INFINITY),
        (Side::Receiver, Some(z)) => (f64::NEG_INFINITY, z),
        (Side::Payer, None) if g_lo >= 0.0 => (f64::NEG_INFINITY, f64::INFINITY),
        (Side::Receiver, None) if g_hi <= 0.0 => (f64::NEG_INFINITY, f64::INFINITY),
        _ => return Ok((0.0, None)),
    };
    let sign = side.sign();
    let v = integrate_gaussian_range(|z| (sign * g(z)).max(0.0), lo, hi, rule)?;
    Ok((v, boundary))
}

/// Context for the quadrature pricers at a calibrated ε.
struct Quad<'a> {
    curve: &'a CreditCurve,
    spec: &'a OptionSpec,
    s: Setup,
    sd: f64,
    eps: f64,
    rule: &'a QuadratureRule,
}

impl<'a> Quad<'a> {
    fn new(curve: &'a CreditCurve, spec: &'a OptionSpec, vol: Vol, rule: &'a QuadratureRule) -> Result<Self> {
        let s = setup(curve, spec)?;
        let sd = vol.sigma() * s.t_e.sqrt();
        let eps = calibrate_inner(curve, &s, vol, rule, curve.risky_discount(s.t_e) / s.annuity)?;
        Ok(Quad {
            curve,
            spec,
            s,
            sd,
            eps,
            rule,
        })
    }

    fn dv01(&self, spread: f64) -> f64 {
        crate::curves::dv01_flat(spread, self.s.tau, self.curve.rate(), self.curve.recovery(), self.eps)
    }

    /// Premium for a given forward, returning the exercise boundary too.
    fn premium(&self, forward: f64, quoted: bool) -> Result<(f64, Option<f64>)> {
        let sp = self.spec;
        let (k, u, c) = (sp.strike_running, sp.strike_upfront, sp.coupon);
        let fixed_leg = (k - c) * self.dv01(k);
        let (v, z) = if quoted {
            let payoff = |q: f64| {
                let d = self.dv01(q);
                let strike_leg = match sp.strike_leg_convention {
                    StrikeLegConvention::SpotAtExpiry => (k - c) * d,
                    StrikeLegConvention::StrikeSpread => fixed_leg,
                };
                ((q - c) * d - u - strike_leg) / d
            };
            integrate_payoff(payoff, forward, self.sd, sp.side, self.rule)?
        } else {
            let payoff = |q: f64| q - k - u / self.dv01(q);
            integrate_payoff(payoff, forward, self.sd, sp.side, self.rule)?
        };
        Ok((v * self.s.annuity, z))
    }

    fn price(&self, quoted: bool) -> Result<PriceResult> {
        let f = self.s.forward;
        let (premium, boundary) = self.premium(f, quoted)?;
        let delta = if f > 0.0 {
            let h = 1e-4 * f;
            let up = self.premium(f + h, quoted)?.0;
            let dn = self.premium(f - h, quoted)?.0;
            (up - dn) / (2.0 * h) / self.s.annuity
        } else {
            0.0
        };
        let mut r = PriceResult {
            premium,
            forward: f,
            d_plus: None,
            d_minus: None,
            delta,
            epsilon_used: self.eps,
            diagnostics: Default::default(),
        }
        .with_diag("annuity", self.s.annuity)
        .with_diag("forward_dv01", self.dv01(f));
        if let Some(z) = boundary {
            r = r.with_diag("exercise_boundary_z", z);
        }
        Ok(r)
    }
}

/// Knockout option with strike `u_K` upfront plus `s_K` running.
pub fn price_ko_upfront_running(
    curve: &CreditCurve,
    spec: &OptionSpec,
    vol: Vol,
    rule: &QuadratureRule,
) -> Result<PriceResult> {
    Quad::new(curve, spec, vol, rule)?.price(false)
}

/// Knockout option on a fixed-coupon contract quoted by spread; the quoted
/// spread is the lognormal state variable.
pub fn price_ko_quoted(curve: &CreditCurve, spec: &OptionSpec, vol: Vol, rule: &QuadratureRule) -> Result<PriceResult> {
    let q = Quad::new(curve, spec, vol, rule)?;
    let f = q.s.forward;
    let c = spec.coupon;
    Ok(q.price(true)?
        .with_diag("forward_quoted_upfront", (f - c) * q.dv01(f))
        .with_diag("forward_par_upfront", (f - c) * q.s.annuity))
}

/// No-knockout option with an upfront strike. On default before expiry the
/// payer delivers the bond against par less `u_K` (a put on recovery struck
/// at `1 − u_K`); the receiver holds the matching call.
pub fn price_nko_upfront_running(
    curve: &CreditCurve,
    spec: &OptionSpec,
    vol: Vol,
    rule: &QuadratureRule,
    rec: &RecoveryParams,
) -> Result<PriceResult> {
    let ko = price_ko_upfront_running(curve, spec, vol, rule)?;
    let t_e = curve.time_to(spec.expiry)?;
    let kind = match spec.side {
        Side::Payer => RecoveryOptionKind::Put,
        Side::Receiver => RecoveryOptionKind::Call,
    };
    // strikes outside (0, 1) give 0 or the full swap value
    let leg = rec.expect(kind, 1.0 - spec.strike_upfront) * default_weight(curve, t_e);
    Ok(PriceResult {
        premium: ko.premium + leg,
        ..ko
    }
    .with_diag("recovery_option", leg))
}

/// Route a spec to the matching pricer. No-knockout options with an upfront
/// strike need recovery parameters.
pub fn price(
    curve: &CreditCurve,
    spec: &OptionSpec,
    vol: Vol,
    rule: &QuadratureRule,
    rec: Option<&RecoveryParams>,
) -> Result<PriceResult> {
    match (spec.knockout, spec.coupon > 0.0, spec.strike_upfront > 0.0) {
        (true, true, _) => price_ko_quoted(curve, spec, vol, rule),
        (false, true, _) => Err(Error::Unsupported(
            "no-knockout options on quoted-spread contracts".into(),
        )),
        (true, false, false) => price_ko_running(curve, spec, vol),
        (false, false, false) => price_nko_running(curve, spec, vol),
        (true, false, true) => price_ko_upfront_running(curve, spec, vol, rule),
        (false, false, true) => {
            let rec = rec.ok_or_else(|| Error::domain("no-knockout upfront strike needs recovery parameters"))?;
            price_nko_upfront_running(curve, spec, vol, rule, rec)
        }
    }
}
