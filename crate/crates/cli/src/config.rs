//! JSON market configuration. Spreads are in basis points, index prices per
//! 100, everything else in decimals.

use std::path::Path;

use cdsopt_core::copula::{BaseDistribution, FactorModel};
use cdsopt_core::curves::calibrate_flat_rate;
use cdsopt_core::index::{IndexQuote, IndexState, IndexStrike};
use cdsopt_core::single_name::{OptionSpec, StrikeLegConvention};
use cdsopt_core::{year_fraction, CreditCurve, QuadratureRule, RecoveryParams, Side, Vol, BP};
use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{CliError, CliResult, ConfigContext};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub valuation_date: NaiveDate,
    pub expiry: NaiveDate,
    pub maturity: NaiveDate,
    pub riskfree_rate: RateInput,
    pub spot_spread_bp: Option<f64>,
    pub marking_recovery: Option<f64>,
    pub vol: Option<f64>,
    pub option: Option<OptionConfig>,
    pub recovery: Option<RecoveryConfig>,
    pub index: Option<IndexConfig>,
    pub copula: Option<CopulaConfig>,
    pub quadrature_nodes: Option<usize>,
    pub seed: Option<u64>,
}

/// A flat rate, or one calibrated so the flat curve at `spread_bp` has the
/// given forward annuity between expiry and maturity.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum RateInput {
    Fixed(f64),
    Calibrated { target_annuity: f64, spread_bp: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionConfig {
    pub strike_running_bp: f64,
    #[serde(default)]
    pub strike_upfront: f64,
    #[serde(default = "payer")]
    pub side: Side,
    #[serde(default = "yes")]
    pub knockout: bool,
    #[serde(default)]
    pub coupon_bp: f64,
    #[serde(default)]
    pub strike_leg_convention: StrikeLegConvention,
}

fn payer() -> Side {
    Side::Payer
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoveryConfig {
    pub a: Option<f64>,
    pub mean: Option<f64>,
    pub b: Option<f64>,
    /// Extra widths for density tables.
    #[serde(default)]
    pub widths: Vec<f64>,
    /// Strikes for recovery option tables.
    #[serde(default)]
    pub strikes: Vec<f64>,
    pub fit_mean: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    pub n00: u32,
    pub n0: u32,
    pub nt: u32,
    #[serde(default)]
    pub loss: f64,
    pub coupon_bp: f64,
    pub spread_bp: Option<f64>,
    pub price: Option<f64>,
    pub recovery: f64,
    pub strike_date: Option<NaiveDate>,
    #[serde(default)]
    pub default_dates: Vec<NaiveDate>,
    pub pv_vol: Option<f64>,
    /// Strike spreads in bp for spread quotes, strike prices per 100 for
    /// price quotes.
    #[serde(default)]
    pub strikes: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopulaConfig {
    pub pbar: f64,
    pub rho: f64,
    pub beta: f64,
    #[serde(default)]
    pub base: BaseDistribution,
    pub names: usize,
    #[serde(default = "one")]
    pub names_per_factor: usize,
}

fn one() -> usize {
    1
}

pub fn load(path: &Path) -> CliResult<MarketConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> CliResult<MarketConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: MarketConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(format!("at `{path}`: {}", e.inner()))
    })?;
    cfg.check_dates()?;
    Ok(cfg)
}

fn need<'a, T>(v: &'a Option<T>, field: &str) -> CliResult<&'a T> {
    v.as_ref()
        .ok_or_else(|| CliError::config(format!("missing field `{field}`")))
}

impl MarketConfig {
    fn check_dates(&self) -> CliResult<()> {
        year_fraction(self.valuation_date, self.expiry).in_config("expiry")?;
        year_fraction(self.expiry, self.maturity).in_config("maturity")?;
        if self.expiry == self.maturity {
            return Err(CliError::config("maturity must be after expiry"));
        }
        Ok(())
    }

    fn years(&self, d: NaiveDate) -> f64 {
        (d - self.valuation_date).num_days() as f64 / 365.0
    }

    pub fn marking_recovery(&self) -> CliResult<f64> {
        need(&self.marking_recovery, "marking_recovery").copied()
    }

    pub fn rate(&self) -> CliResult<f64> {
        match self.riskfree_rate {
            RateInput::Fixed(r) => Ok(r),
            RateInput::Calibrated {
                target_annuity,
                spread_bp,
            } => {
                let rec = self.marking_recovery()?;
                calibrate_flat_rate(
                    target_annuity,
                    spread_bp * BP,
                    rec,
                    self.years(self.expiry),
                    self.years(self.maturity),
                )
                .in_config("riskfree_rate")
            }
        }
    }

    pub fn curve(&self) -> CliResult<CreditCurve> {
        let s = need(&self.spot_spread_bp, "spot_spread_bp")?;
        CreditCurve::new(self.valuation_date, self.rate()?, s * BP, self.marking_recovery()?).in_config("curve")
    }

    pub fn vol(&self) -> CliResult<Vol> {
        Vol::new(*need(&self.vol, "vol")?).in_config("vol")
    }

    pub fn rule(&self, nodes: Option<usize>) -> CliResult<QuadratureRule> {
        match nodes.or(self.quadrature_nodes) {
            Some(n) => QuadratureRule::gauss_hermite(n).in_config("quadrature_nodes"),
            None => Ok(QuadratureRule::default()),
        }
    }

    pub fn option_spec(&self) -> CliResult<OptionSpec> {
        let o = need(&self.option, "option")?;
        let spec = OptionSpec::running(self.expiry, self.maturity, o.strike_running_bp * BP, o.side)
            .with_upfront(o.strike_upfront)
            .with_knockout(o.knockout)
            .with_coupon(o.coupon_bp * BP, o.strike_leg_convention);
        spec.validate().in_config("option")?;
        Ok(spec)
    }

    pub fn recovery_config(&self) -> CliResult<&RecoveryConfig> {
        need(&self.recovery, "recovery")
    }

    fn location(&self) -> CliResult<f64> {
        let r = self.recovery_config()?;
        match (r.a, r.mean) {
            (Some(a), None) => Ok(a),
            (None, Some(m)) => cdsopt_core::numerics::norm_inv(m).in_config("recovery.mean"),
            _ => Err(CliError::config("recovery: give exactly one of `a` or `mean`")),
        }
    }

    pub fn recovery_params(&self) -> CliResult<RecoveryParams> {
        let b = *need(&self.recovery_config()?.b, "recovery.b")?;
        RecoveryParams::new(self.location()?, b).in_config("recovery")
    }

    /// Parameters for every width in `recovery.widths`, or `recovery.b` alone.
    pub fn recovery_family(&self) -> CliResult<Vec<RecoveryParams>> {
        let r = self.recovery_config()?;
        if r.widths.is_empty() {
            return Ok(vec![self.recovery_params()?]);
        }
        let a = self.location()?;
        r.widths
            .iter()
            .map(|&b| RecoveryParams::new(a, b).in_config("recovery.widths"))
            .collect()
    }

    pub fn index_config(&self) -> CliResult<&IndexConfig> {
        need(&self.index, "index")
    }

    pub fn index_state(&self) -> CliResult<IndexState> {
        let i = self.index_config()?;
        let quote = match (i.spread_bp, i.price) {
            (Some(s), None) => IndexQuote::Spread(s * BP),
            (None, Some(p)) => IndexQuote::Price(p),
            _ => return Err(CliError::config("index: give exactly one of `spread_bp` or `price`")),
        };
        let state = IndexState {
            n00: i.n00,
            n0: i.n0,
            nt: i.nt,
            loss: i.loss,
            coupon: i.coupon_bp * BP,
            quote,
            recovery: i.recovery,
            rate: self.rate()?,
            strike_date: i.strike_date.unwrap_or(self.valuation_date),
            valuation_date: self.valuation_date,
            expiry: self.expiry,
            maturity: self.maturity,
            default_dates: i.default_dates.clone(),
        };
        state.validate().in_config("index")?;
        Ok(state)
    }

    /// Converts a strike in quote units to the pricing strike.
    pub fn index_strike(&self, state: &IndexState, strike: f64) -> IndexStrike {
        match state.quote {
            IndexQuote::Spread(_) => IndexStrike::Spread(strike * BP),
            IndexQuote::Price(_) => IndexStrike::Upfront(cdsopt_core::index::price_to_upfront(strike)),
        }
    }

    pub fn index_vol(&self) -> CliResult<Vol> {
        let v = need(&self.index_config()?.pv_vol, "index.pv_vol")?;
        Vol::new(*v).in_config("index.pv_vol")
    }

    pub fn factor_model(&self) -> CliResult<(FactorModel, &CopulaConfig)> {
        let c = need(&self.copula, "copula")?;
        Ok((FactorModel::new(c.pbar, c.rho, c.beta, c.base).in_config("copula")?, c))
    }
}
