use std::path::Path;

use cdsopt_core::index::{implied_pv_vol, price_index_option, IndexQuote};
use cdsopt_core::numerics::norm_cdf;
use cdsopt_core::recovery::{fit_params, option_pv_at, recovery_swap_pv, RecoveryOptionKind, RecoveryQuote};
use cdsopt_core::single_name::price;
use cdsopt_core::validation::{oracle_black76, oracle_index_terminal, oracle_recovery_mc, OracleReport, DEFAULT_SEED};
use cdsopt_core::{copula, Side, BP};
use serde::{Deserialize, Serialize};

use crate::config::MarketConfig;
use crate::error::{CliError, CliResult, ConfigContext};
use crate::scan::Scan;

#[derive(Debug, Serialize)]
pub struct SingleRow {
    pub upfront_strike_pct: f64,
    pub running_strike_bp: f64,
    pub ko_payer_bp: f64,
    pub nko_payer_bp: f64,
    pub ko_receiver_bp: f64,
    pub nko_receiver_bp: f64,
}

/// Premiums as the strike moves from running to upfront at a fixed total
/// running-equivalent strike.
pub fn single(cfg: &MarketConfig, nodes: Option<usize>, scan: Option<Scan>) -> CliResult<Vec<SingleRow>> {
    let curve = cfg.curve()?;
    let vol = cfg.vol()?;
    let rule = cfg.rule(nodes)?;
    let base = cfg.option_spec()?;
    let rec = cfg.recovery_params()?;
    let t_e = curve.time_to(cfg.expiry).in_config("expiry")?;
    let t_m = curve.time_to(cfg.maturity).in_config("maturity")?;
    let annuity = curve.forward_rpv01(t_e, t_m)?;
    let total_bp = base.strike_running / BP + base.strike_upfront / annuity / BP;
    let scan = scan.unwrap_or(Scan {
        lo: total_bp,
        hi: 0.0,
        steps: 10,
    });
    scan.points()
        .into_iter()
        .map(|running_bp| {
            if running_bp > total_bp + 1e-9 || running_bp < 0.0 {
                return Err(CliError::config(format!(
                    "scan point {running_bp}bp outside [0, {total_bp}bp], the total running-equivalent strike"
                )));
            }
            let upfront = ((total_bp - running_bp) * BP * annuity).max(0.0);
            let spec = base.with_upfront(upfront);
            let spec = cdsopt_core::single_name::OptionSpec {
                strike_running: running_bp * BP,
                ..spec
            };
            let run = |side: Side, knockout: bool| -> CliResult<f64> {
                let s = spec.with_side(side).with_knockout(knockout);
                Ok(price(&curve, &s, vol, &rule, Some(&rec))?.premium / BP)
            };
            Ok(SingleRow {
                upfront_strike_pct: upfront * 100.0,
                running_strike_bp: running_bp,
                ko_payer_bp: run(Side::Payer, true)?,
                nko_payer_bp: run(Side::Payer, false)?,
                ko_receiver_bp: run(Side::Receiver, true)?,
                nko_receiver_bp: run(Side::Receiver, false)?,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct IndexPriceRow {
    pub strike: f64,
    pub payer_bp: f64,
    pub receiver_bp: f64,
    pub payer_delta: f64,
    pub x_tilde: f64,
    pub y_tilde: f64,
    pub parity_residual: f64,
}

fn index_strikes(cfg: &MarketConfig, scan: Option<Scan>) -> CliResult<Vec<f64>> {
    match scan {
        Some(s) => Ok(s.points()),
        None if !cfg.index_config()?.strikes.is_empty() => Ok(cfg.index_config()?.strikes.clone()),
        None => Err(CliError::config("index: give `strikes` or --scan")),
    }
}

/// Strikes are in the quote's units: bp for spread quotes, price per 100
/// for price quotes.
pub fn index_price(cfg: &MarketConfig, scan: Option<Scan>) -> CliResult<Vec<IndexPriceRow>> {
    let state = cfg.index_state()?;
    let vol = cfg.index_vol()?;
    index_strikes(cfg, scan)?
        .into_iter()
        .map(|k| {
            let strike = cfg.index_strike(&state, k);
            let p = price_index_option(&state, strike, vol, Side::Payer)?;
            let r = price_index_option(&state, strike, vol, Side::Receiver)?;
            let (x, y) = (p.diagnostics["x_tilde"], p.diagnostics["y_tilde"]);
            Ok(IndexPriceRow {
                strike: k,
                payer_bp: p.premium / BP,
                receiver_bp: r.premium / BP,
                payer_delta: p.delta,
                x_tilde: x,
                y_tilde: y,
                parity_residual: p.premium - r.premium - (x - y),
            })
        })
        .collect()
}

#[derive(Debug, Deserialize)]
pub struct QuoteRow {
    pub strike: f64,
    pub side: Side,
    pub premium_bp: f64,
}

#[derive(Debug, Serialize)]
pub struct ImpliedVolRow {
    pub strike: f64,
    pub side: Side,
    pub premium_bp: f64,
    pub implied_pv_vol: Option<f64>,
    pub error: Option<String>,
}

/// Implied PV vols for each quote; quotes outside the no-arbitrage bounds
/// get an error marker and the run continues.
pub fn index_implied(cfg: &MarketConfig, quotes: &Path) -> CliResult<Vec<ImpliedVolRow>> {
    let state = cfg.index_state()?;
    let mut rdr = csv::Reader::from_path(quotes).map_err(|e| CliError::config(format!("{}: {e}", quotes.display())))?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<QuoteRow>().enumerate() {
        let q = row.map_err(|e| CliError::config(format!("{} row {}: {e}", quotes.display(), i + 1)))?;
        let strike = cfg.index_strike(&state, q.strike);
        let (implied_pv_vol, error) = match implied_pv_vol(&state, strike, q.premium_bp * BP, q.side) {
            Ok(v) => (Some(v.sigma()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(ImpliedVolRow {
            strike: q.strike,
            side: q.side,
            premium_bp: q.premium_bp,
            implied_pv_vol,
            error,
        });
    }
    Ok(out)
}

/// Default density grid: 201 uniform points on [0, 1] merged with points
/// uniform in probit space, x = Φ(y) for y in [-8, 8], which resolve the
/// steep tails near 0 and 1.
fn density_grid() -> Vec<f64> {
    let mut xs = Scan {
        lo: 0.0,
        hi: 1.0,
        steps: 200,
    }
    .points();
    xs.extend(
        Scan {
            lo: -8.0,
            hi: 8.0,
            steps: 1280,
        }
        .points()
        .into_iter()
        .map(norm_cdf)
        .filter(|x| (1e-12..1.0 - 1e-12).contains(x)),
    );
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    xs
}

/// Density columns, one per width.
pub fn recovery_density(cfg: &MarketConfig, scan: Option<Scan>) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let family = cfg.recovery_family()?;
    let grid = scan.map_or_else(density_grid, |s| s.points());
    let mut header = vec!["recovery".to_string()];
    header.extend(family.iter().map(|p| format!("density_b{}", p.b())));
    let rows = grid
        .into_iter()
        .map(|x| std::iter::once(x).chain(family.iter().map(|p| p.density(x))).collect())
        .collect();
    Ok((header, rows))
}

#[derive(Debug, Serialize)]
pub struct RecoveryPriceRow {
    pub strike: f64,
    pub call_expect: f64,
    pub put_expect: f64,
    pub call_pv_bp: f64,
    pub put_pv_bp: f64,
    pub swap_pv_bp: f64,
}

pub fn recovery_price(cfg: &MarketConfig, scan: Option<Scan>) -> CliResult<Vec<RecoveryPriceRow>> {
    let curve = cfg.curve()?;
    let p = cfg.recovery_params()?;
    let t_e = curve.time_to(cfg.expiry).in_config("expiry")?;
    let strikes = match scan {
        Some(s) => s.points(),
        None if !cfg.recovery_config()?.strikes.is_empty() => cfg.recovery_config()?.strikes.clone(),
        None => Err(CliError::config("recovery: give `strikes` or --scan"))?,
    };
    strikes
        .into_iter()
        .map(|k| {
            let q = RecoveryQuote::new(k, cfg.expiry).in_config("recovery.strikes")?;
            Ok(RecoveryPriceRow {
                strike: k,
                call_expect: p.call_expect(k),
                put_expect: p.put_expect(k),
                call_pv_bp: option_pv_at(&curve, &p, k, t_e, RecoveryOptionKind::Call) / BP,
                put_pv_bp: option_pv_at(&curve, &p, k, t_e, RecoveryOptionKind::Put) / BP,
                swap_pv_bp: recovery_swap_pv(&curve, &p, &q)? / BP,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct FitRow {
    pub a: f64,
    pub b: f64,
    pub mean: f64,
    pub ks: f64,
    pub at_boundary: bool,
    pub samples: usize,
}

/// One-column CSV of recovery fractions, with or without a header.
pub fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let field = rec.get(0).unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(x) if (0.0..=1.0).contains(&x) => out.push(x),
            Ok(x) => {
                return Err(CliError::config(format!(
                    "{} row {}: {x} outside [0, 1]",
                    path.display(),
                    i + 1
                )))
            }
            Err(_) if i == 0 => {}
            Err(e) => return Err(CliError::config(format!("{} row {}: {e}", path.display(), i + 1))),
        }
    }
    Ok(out)
}

pub fn recovery_fit(cfg: &MarketConfig, samples: &Path, fixed_mean: Option<f64>) -> CliResult<FitRow> {
    let xs = read_samples(samples)?;
    let mean = fixed_mean.or(cfg.recovery.as_ref().and_then(|r| r.fit_mean));
    let fit = fit_params(&xs, mean).in_config("samples")?;
    Ok(FitRow {
        a: fit.params.a(),
        b: fit.params.b(),
        mean: fit.params.mean(),
        ks: fit.ks,
        at_boundary: fit.at_boundary,
        samples: xs.len(),
    })
}

#[derive(Debug, Serialize)]
pub struct CopulaRow {
    pub index: usize,
    pub defaulted: bool,
    pub recovery: Option<f64>,
}

pub fn copula_sample(cfg: &MarketConfig, nodes: Option<usize>, seed: Option<u64>) -> CliResult<Vec<CopulaRow>> {
    let (model, c) = cfg.factor_model()?;
    let rec = cfg.recovery_params()?;
    let rule = cfg.rule(nodes)?;
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let s = copula::sample_joint(&model, &rec, c.names, c.names_per_factor, seed, &rule).in_config("copula")?;
    Ok(s.into_iter()
        .map(|x| CopulaRow {
            index: x.index,
            defaulted: x.defaulted,
            recovery: x.recovery,
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct NamedReport {
    pub name: String,
    pub report: OracleReport,
    pub agrees: bool,
}

/// Runs every oracle the config has inputs for.
pub fn validate(
    cfg: &MarketConfig,
    nodes: Option<usize>,
    seed: Option<u64>,
    paths: usize,
) -> CliResult<Vec<NamedReport>> {
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let mut out = Vec::new();
    if cfg.option.is_some() {
        let curve = cfg.curve()?;
        let spec = cfg.option_spec()?.with_upfront(0.0);
        for side in [Side::Payer, Side::Receiver] {
            let r = oracle_black76(&curve, &spec.with_side(side), cfg.vol()?, nodes.unwrap_or(256))?;
            out.push(NamedReport {
                name: format!("black76_{side:?}").to_lowercase(),
                agrees: r.agrees(1e-6),
                report: r,
            });
        }
    }
    if cfg.recovery.is_some() {
        let p = cfg.recovery_params()?;
        let strikes = cfg.recovery_config()?.strikes.clone();
        let strikes = if strikes.is_empty() { vec![p.mean()] } else { strikes };
        for (i, k) in strikes.into_iter().enumerate() {
            for kind in [RecoveryOptionKind::Call, RecoveryOptionKind::Put] {
                let r = oracle_recovery_mc(&p, k, kind, paths, seed + i as u64)?;
                out.push(NamedReport {
                    name: format!("recovery_{kind:?}_{k}").to_lowercase(),
                    agrees: r.agrees(3.0),
                    report: r,
                });
            }
        }
    }
    if cfg.index.is_some() {
        let state = cfg.index_state()?;
        let vol = cfg.index_vol()?;
        let strikes = index_strikes(cfg, None).unwrap_or_else(|_| match state.quote {
            IndexQuote::Spread(s) => vec![s / BP],
            IndexQuote::Price(p) => vec![p],
        });
        for k in strikes {
            for side in [Side::Payer, Side::Receiver] {
                let r = oracle_index_terminal(&state, cfg.index_strike(&state, k), vol, side, paths, seed)?;
                out.push(NamedReport {
                    name: format!("index_{side:?}_{k}").to_lowercase(),
                    agrees: r.agrees(3.0),
                    report: r,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::config(
            "nothing to validate: config has no option, recovery or index section",
        ));
    }
    Ok(out)
}
