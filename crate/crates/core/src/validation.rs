//! Brute-force oracles for the closed-form pricers.
//!
//! Each oracle evaluates the payoff directly (adaptive Simpson on the
//! lognormal density, or Monte Carlo) rather than reusing the pricer's
//! formula.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::curves::CreditCurve;
use crate::error::{Error, Result};
use crate::index::{price_index_option, x_tilde, y_tilde, IndexState, IndexStrike};
use crate::numerics::{integrate_gaussian_range, norm_cdf, QuadratureRule};
use crate::recovery::{RecoveryOptionKind, RecoveryParams};
use crate::single_name::{price_ko_running, OptionSpec};
use crate::types::{Side, Vol};

pub const DEFAULT_SEED: u64 = 20_091_109;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Quadrature nodes or Monte Carlo paths.
    pub effort: usize,
    /// Monte Carlo only.
    pub standard_error: Option<f64>,
}

impl OracleReport {
    fn new(closed_form: f64, oracle: f64, effort: usize, standard_error: Option<f64>) -> Self {
        let abs_err = (closed_form - oracle).abs();
        let rel_err = if closed_form != 0.0 {
            abs_err / closed_form.abs()
        } else {
            abs_err
        };
        OracleReport {
            closed_form,
            oracle,
            abs_err,
            rel_err,
            effort,
            standard_error,
        }
    }

    /// Whether the closed form lies within `k` standard errors (MC) or
    /// within `k` relative error (quadrature).
    pub fn agrees(&self, k: f64) -> bool {
        match self.standard_error {
            Some(se) => self.abs_err <= k * se,
            None => self.rel_err <= k,
        }
    }
}

/// ∫_{t1}^{t2} e^{−g u} du by composite Simpson.
fn simpson_annuity(g: f64, t1: f64, t2: f64) -> f64 {
    let n = 2000;
    let h = (t2 - t1) / n as f64;
    let f = |u: f64| (-g * u).exp();
    let inner: f64 = (1..n)
        .map(|i| f(t1 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(t1) + inner + f(t2)) * h / 3.0
}

/// Integrate the knockout all-running payoff `(s(z) − s_K)⁺` (or the
/// receiver's) against the lognormal law with adaptive Simpson started at
/// the exercise boundary, times a Simpson-integrated forward annuity.
pub fn oracle_black76(curve: &CreditCurve, spec: &OptionSpec, vol: Vol, nodes: usize) -> Result<OracleReport> {
    let closed = price_ko_running(curve, spec, vol)?.premium;
    let t_e = curve.time_to(spec.expiry)?;
    let t_m = curve.time_to(spec.maturity)?;
    let h = curve.hazard();
    let annuity = simpson_annuity(curve.rate() + h, t_e, t_m);
    let fwd = (1.0 - curve.recovery()) * h;
    let k = spec.strike_running;
    let v = vol.sigma() * t_e.sqrt();
    let rule = QuadratureRule::adaptive_simpson(nodes, 14.0)?;
    let s = |z: f64| fwd * (v * z - 0.5 * v * v).exp();
    let kink = if fwd > 0.0 {
        ((k / fwd).ln() + 0.5 * v * v) / v
    } else {
        f64::INFINITY
    };
    let e = match spec.side {
        Side::Payer => integrate_gaussian_range(|z| (s(z) - k).max(0.0), kink, f64::INFINITY, &rule)?,
        Side::Receiver => integrate_gaussian_range(|z| (k - s(z)).max(0.0), f64::NEG_INFINITY, kink, &rule)?,
    };
    Ok(OracleReport::new(closed, e * annuity, nodes, None))
}

/// Monte Carlo of `(R − u)⁺` or `(u − R)⁺` with `R = Φ((a + bZ)/√(1−b²))`.
pub fn oracle_recovery_mc(
    params: &RecoveryParams,
    u: f64,
    kind: RecoveryOptionKind,
    n: usize,
    seed: u64,
) -> Result<OracleReport> {
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least two paths"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (params.a(), params.b());
    let s = (1.0 - b * b).sqrt();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let r = norm_cdf((a + b * z) / s);
        let x = match kind {
            RecoveryOptionKind::Call => (r - u).max(0.0),
            RecoveryOptionKind::Put => (u - r).max(0.0),
        };
        sum += x;
        sum2 += x * x;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let se = ((sum2 / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
    Ok(OracleReport::new(params.expect(kind, u), mean, n, Some(se)))
}

/// Monte Carlo of the index option: terminal `X` lognormal around `X̃` with
/// PV volatility `vol`, paid against the fixed `Ỹ`. Antithetic pairs.
pub fn oracle_index_terminal(
    state: &IndexState,
    strike: IndexStrike,
    vol: Vol,
    side: Side,
    n: usize,
    seed: u64,
) -> Result<OracleReport> {
    if n < 4 {
        return Err(Error::domain("Monte Carlo needs at least four paths"));
    }
    let closed = price_index_option(state, strike, vol, side)?.premium;
    let x0 = x_tilde(state)?;
    let y = y_tilde(state, strike)?;
    let dt = (state.expiry - state.valuation_date).num_days() as f64 / 365.0;
    let v = vol.sigma() * dt.sqrt();
    let payoff = |x: f64| (side.sign() * (x - y)).max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = n / 2;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..pairs {
        let z: f64 = rng.sample(StandardNormal);
        let p = 0.5 * (payoff(x0 * (v * z - 0.5 * v * v).exp()) + payoff(x0 * (-v * z - 0.5 * v * v).exp()));
        sum += p;
        sum2 += p * p;
    }
    let nf = pairs as f64;
    let mean = sum / nf;
    let se = ((sum2 / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
    Ok(OracleReport::new(closed, mean, 2 * pairs, Some(se)))
}
