//! Vasicek-distributed realised recovery `R = Φ((a + bZ)/√(1−b²))`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::curves::CreditCurve;
use crate::error::{Error, Result};
use crate::numerics::{binorm_cdf, norm_cdf, norm_inv, norm_pdf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryParams {
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryOptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryQuote {
    strike: f64,
    expiry: NaiveDate,
}

impl RecoveryQuote {
    pub fn new(strike: f64, expiry: NaiveDate) -> Result<Self> {
        if !(0.0..=1.0).contains(&strike) {
            return Err(Error::Strike(format!(
                "recovery strike must lie in [0, 1], got {strike}"
            )));
        }
        Ok(RecoveryQuote { strike, expiry })
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn expiry(&self) -> NaiveDate {
        self.expiry
    }
}

fn phi2(x: f64, y: f64, rho: f64) -> f64 {
    // rho is always a valid correlation here
    binorm_cdf(x, y, rho).expect("correlation in [-1, 1]")
}

impl RecoveryParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::domain(format!("recovery location must be finite, got {a}")));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!("recovery width must lie in (0, 1), got {b}")));
        }
        Ok(RecoveryParams { a, b })
    }

    /// Parameters with mean recovery `mean`.
    pub fn from_mean(mean: f64, b: f64) -> Result<Self> {
        Self::new(norm_inv(mean)?, b)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    fn s(&self) -> f64 {
        (1.0 - self.b * self.b).sqrt()
    }

    /// Realised recovery for factor value `z`.
    pub fn recovery_at(&self, z: f64) -> f64 {
        norm_cdf((self.a + self.b * z) / self.s())
    }

    pub fn mean(&self) -> f64 {
        norm_cdf(self.a)
    }

    pub fn mean_var(&self) -> (f64, f64) {
        let m = self.mean();
        let v = phi2(self.a, self.a, self.b * self.b) - m * m;
        (m, v.max(0.0))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let y = norm_inv(x).expect("x in (0, 1)");
        norm_cdf((y * self.s() - self.a) / self.b)
    }

    /// Density on (0, 1), zero outside.
    pub fn density(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        let y = norm_inv(x).expect("x in (0, 1)");
        let s = self.s();
        let z = (y * s - self.a) / self.b;
        let d = norm_pdf(z) * (s / self.b) / norm_pdf(y);
        if d.is_finite() {
            d
        } else {
            0.0
        }
    }

    fn c(&self, u: f64) -> f64 {
        (self.a - norm_inv(u).expect("u in (0, 1)") * self.s()) / self.b
    }

    /// E[(R − u)⁺].
    pub fn call_expect(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.mean() - u;
        }
        if u >= 1.0 {
            return 0.0;
        }
        let c = self.c(u);
        (phi2(self.a, c, self.b) - norm_cdf(c) * u).max(0.0)
    }

    /// E[(u − R)⁺].
    pub fn put_expect(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return u - self.mean();
        }
        let c = self.c(u);
        (norm_cdf(-c) * u - phi2(self.a, -c, -self.b)).max(0.0)
    }

    pub fn expect(&self, kind: RecoveryOptionKind, u: f64) -> f64 {
        match kind {
            RecoveryOptionKind::Call => self.call_expect(u),
            RecoveryOptionKind::Put => self.put_expect(u),
        }
    }
}

/// B(t_E) − B*(t_E): value of one unit paid at t_E if default occurs before it.
pub fn default_weight(curve: &CreditCurve, t_e: f64) -> f64 {
    curve.discount(t_e) - curve.risky_discount(t_e)
}

pub fn option_pv_at(
    curve: &CreditCurve,
    params: &RecoveryParams,
    strike: f64,
    t_e: f64,
    kind: RecoveryOptionKind,
) -> f64 {
    params.expect(kind, strike) * default_weight(curve, t_e)
}

pub fn recovery_option_pv(
    curve: &CreditCurve,
    params: &RecoveryParams,
    quote: &RecoveryQuote,
    kind: RecoveryOptionKind,
) -> Result<f64> {
    let t_e = curve.time_to(quote.expiry)?;
    Ok(option_pv_at(curve, params, quote.strike, t_e, kind))
}

/// Receive realised recovery, pay the strike, contingent on default.
pub fn recovery_swap_pv(curve: &CreditCurve, params: &RecoveryParams, quote: &RecoveryQuote) -> Result<f64> {
    let t_e = curve.time_to(quote.expiry)?;
    Ok((params.mean() - quote.strike) * default_weight(curve, t_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryFit {
    pub params: RecoveryParams,
    pub ks: f64,
    /// True when the width ended on an edge of its search range.
    pub at_boundary: bool,
}

const B_MIN: f64 = 1e-4;
const B_MAX: f64 = 1.0 - 1e-4;
const B_STEP: f64 = 0.01;
const A_GRID: usize = 121;
const FIT_TOL: f64 = 1e-4;

/// Kolmogorov-Smirnov statistic of sorted probits `ys` against (a, b).
fn ks_stat(ys: &[f64], a: f64, b: f64) -> f64 {
    let n = ys.len() as f64;
    let s = (1.0 - b * b).sqrt();
    ys.iter().enumerate().fold(0.0f64, |d, (i, &y)| {
        let f = norm_cdf((y * s - a) / b);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid over b followed by golden-section refinement around the best node.
fn fit_b(ys: &[f64], a: f64) -> (f64, f64) {
    let steps = ((B_MAX - B_MIN) / B_STEP).ceil() as usize;
    let grid = |i: usize| (B_MIN + i as f64 * B_STEP).min(B_MAX);
    let (best_i, best) = (0..=steps)
        .map(|i| (i, ks_stat(ys, a, grid(i))))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let lo = grid(best_i.saturating_sub(1));
    let hi = grid((best_i + 1).min(steps));
    let (b, ks) = golden_min(|b| ks_stat(ys, a, b), lo, hi, FIT_TOL);
    if ks < best {
        (b, ks)
    } else {
        (grid(best_i), best)
    }
}

/// Fit (a, b) by minimising the Kolmogorov-Smirnov distance to `samples`.
///
/// With `fixed_mean`, `a = Φ⁻¹(mean)` and only `b` is searched. Otherwise
/// `a` is gridded over `[Φ⁻¹(0.001), Φ⁻¹(0.999)]` and refined by
/// alternating golden-section steps.
pub fn fit_params(samples: &[f64], fixed_mean: Option<f64>) -> Result<RecoveryFit> {
    if samples.len() < 2 {
        return Err(Error::domain("recovery fit needs at least two samples"));
    }
    if let Some(x) = samples.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(Error::domain(format!("recovery samples must lie in (0, 1), got {x}")));
    }
    let mut ys: Vec<f64> = samples.iter().map(|&x| norm_inv(x)).collect::<Result<_>>()?;
    ys.sort_by(f64::total_cmp);

    let (a, b, ks) = match fixed_mean {
        Some(m) => {
            let a = norm_inv(m)?;
            let (b, ks) = fit_b(&ys, a);
            (a, b, ks)
        }
        None => {
            let a_lo = norm_inv(0.001)?;
            let a_hi = norm_inv(0.999)?;
            let step = (a_hi - a_lo) / (A_GRID - 1) as f64;
            let (mut a, (mut b, mut ks)) = (0..A_GRID)
                .map(|i| {
                    let a = a_lo + i as f64 * step;
                    (a, fit_b(&ys, a))
                })
                .fold(
                    (0.0, (0.0, f64::INFINITY)),
                    |acc, x| if x.1 .1 < acc.1 .1 { x } else { acc },
                );
            for _ in 0..8 {
                let (na, nks) = golden_min(
                    |a| ks_stat(&ys, a, b),
                    (a - step).max(a_lo),
                    (a + step).min(a_hi),
                    FIT_TOL,
                );
                if nks < ks {
                    a = na;
                    ks = nks;
                }
                let (nb, nks) = golden_min(
                    |b| ks_stat(&ys, a, b),
                    (b - B_STEP).max(B_MIN),
                    (b + B_STEP).min(B_MAX),
                    FIT_TOL,
                );
                if nks < ks {
                    b = nb;
                    ks = nks;
                }
            }
            (a, b, ks)
        }
    };
    let at_boundary = b - B_MIN < 2.0 * FIT_TOL || B_MAX - b < 2.0 * FIT_TOL;
    Ok(RecoveryFit {
        params: RecoveryParams::new(a, b)?,
        ks,
        at_boundary,
    })
}
