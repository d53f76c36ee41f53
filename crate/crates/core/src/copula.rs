//! Additive factor copula for joint defaults and recoveries.
//!
//! Conditional on a common factor `A`, a name defaults with probability
//! `p(A)` and carries a recovery variable `ε + βA` with `ε ~ F`. Mapping that
//! variable through `Φ⁻¹ ∘ F♯`, where `F♯` is its distribution given default,
//! makes the recovery factor `Z` exactly standard normal given default, so
//! `R(Z)` is exactly Vasicek while recoveries fall when defaults cluster.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_gaussian, norm_cdf, norm_inv, Bracket, QuadratureRule};
use crate::recovery::RecoveryParams;

/// Distribution of the idiosyncratic recovery shock `ε`, unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseDistribution {
    #[default]
    Normal,
    Logistic,
}

const LOGISTIC_SCALE: f64 = 0.551_328_895_421_792_1; // √3/π

impl BaseDistribution {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            BaseDistribution::Normal => norm_cdf(x),
            BaseDistribution::Logistic => 1.0 / (1.0 + (-x / LOGISTIC_SCALE).exp()),
        }
    }

    /// 1 − cdf(x) without cancellation.
    pub fn sf(self, x: f64) -> f64 {
        self.cdf(-x)
    }

    fn sample(self, rng: &mut impl Rng) -> f64 {
        match self {
            BaseDistribution::Normal => rng.sample(StandardNormal),
            BaseDistribution::Logistic => {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                LOGISTIC_SCALE * (u / (1.0 - u)).ln()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorModel {
    pbar: f64,
    rho: f64,
    beta: f64,
    base: BaseDistribution,
}

impl FactorModel {
    pub fn new(pbar: f64, rho: f64, beta: f64, base: BaseDistribution) -> Result<Self> {
        if !(pbar > 0.0 && pbar < 1.0) {
            return Err(Error::domain(format!(
                "average default probability must lie in (0, 1), got {pbar}"
            )));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::domain(format!(
                "default factor loading must lie in [0, 1), got {rho}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::domain("recovery coupling must be finite"));
        }
        Ok(FactorModel { pbar, rho, beta, base })
    }

    pub fn pbar(&self) -> f64 {
        self.pbar
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn base(&self) -> BaseDistribution {
        self.base
    }

    /// Default probability conditional on the factor.
    pub fn conditional_pd(&self, a: f64) -> f64 {
        self.pd_curve()(a)
    }

    /// `p(·)` with the threshold computed once.
    fn pd_curve(&self) -> impl Fn(f64) -> f64 {
        let k = norm_inv(self.pbar).expect("pbar in (0, 1)");
        let (sr, s1) = (self.rho.sqrt(), (1.0 - self.rho).sqrt());
        move |a| norm_cdf((k - sr * a) / s1)
    }
}

/// `F♯(z) = E[F(z − βA) p(A)] / p̄`: distribution of `ε + βA` given default.
pub fn f_sharp(model: &FactorModel, z: f64, rule: &QuadratureRule) -> Result<f64> {
    let pd = model.pd_curve();
    let v = integrate_gaussian(|a| model.base.cdf(z - model.beta * a) * pd(a), rule)?;
    Ok((v / model.pbar).clamp(0.0, 1.0))
}

/// 1 − F♯(z), accurate in the upper tail.
pub fn f_sharp_upper(model: &FactorModel, z: f64, rule: &QuadratureRule) -> Result<f64> {
    let pd = model.pd_curve();
    let v = integrate_gaussian(|a| model.base.sf(z - model.beta * a) * pd(a), rule)?;
    Ok((v / model.pbar).clamp(0.0, 1.0))
}

/// Standard normal recovery factor for a recovery variable `x`.
fn z_of(model: &FactorModel, x: f64, rule: &QuadratureRule) -> Result<f64> {
    let lo = f_sharp(model, x, rule)?;
    if lo < 0.5 {
        norm_inv(lo.max(f64::MIN_POSITIVE))
    } else {
        Ok(-norm_inv(f_sharp_upper(model, x, rule)?.max(f64::MIN_POSITIVE))?)
    }
}

/// `F♯` with a memoised inverse: a tabulated grid brackets the root, which
/// is then polished on the exact `F♯`.
#[derive(Debug, Clone)]
pub struct FSharpInverse {
    model: FactorModel,
    rule: QuadratureRule,
    grid: Vec<(f64, f64)>,
}

const GRID_POINTS: usize = 401;
const TAIL_PROB: f64 = 1e-15;

impl FSharpInverse {
    pub fn new(model: FactorModel, rule: QuadratureRule) -> Result<Self> {
        let f = |z: f64| f_sharp(&model, z, &rule);
        let fu = |z: f64| f_sharp_upper(&model, z, &rule);
        let width = 8.0 * (1.0 + model.beta * model.beta).sqrt();
        let mut lo = -width;
        while f(lo)? > TAIL_PROB && lo > -1e3 {
            lo *= 1.5;
        }
        let mut hi = width;
        while fu(hi)? > TAIL_PROB && hi < 1e3 {
            hi *= 1.5;
        }
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let grid = (0..GRID_POINTS)
            .map(|i| {
                let z = lo + i as f64 * step;
                Ok((z, f(z)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FSharpInverse { model, rule, grid })
    }

    pub fn model(&self) -> &FactorModel {
        &self.model
    }

    pub fn f_sharp(&self, z: f64) -> Result<f64> {
        f_sharp(&self.model, z, &self.rule)
    }

    /// z with F♯(z) = u, for u in (0, 1).
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("F♯ inverse needs u in (0, 1), got {u}")));
        }
        let i = self.grid.partition_point(|&(_, v)| v < u);
        let (lo, hi) = if i == 0 {
            let z0 = self.grid[0].0;
            (z0 - 10.0 * (1.0 + z0.abs()), z0)
        } else if i == self.grid.len() {
            let z1 = self.grid[i - 1].0;
            (z1, z1 + 10.0 * (1.0 + z1.abs()))
        } else {
            (self.grid[i - 1].0, self.grid[i].0)
        };
        let g = |z: f64| self.f_sharp(z).map(|v| v - u).unwrap_or(f64::NAN);
        find_root(g, Bracket::new(lo, hi)?, 1e-13)
    }

    /// z with 1 − F♯(z) = q, for resolving the upper tail.
    pub fn inverse_upper(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("F♯ upper inverse needs q in (0, 1), got {q}")));
        }
        if q > 0.5 {
            return self.inverse(1.0 - q);
        }
        let lo = self.inverse(0.5)?;
        let mut hi = lo + 1.0;
        let g = |z: f64| {
            f_sharp_upper(&self.model, z, &self.rule)
                .map(|v| q - v)
                .unwrap_or(f64::NAN)
        };
        while g(hi) < 0.0 && hi < 1e4 {
            hi = lo + 2.0 * (hi - lo);
        }
        find_root(g, Bracket::new(lo, hi)?, 1e-13)
    }

    /// P[Z < z | A = a] among defaulted names: `F(F♯⁻¹(Φ(z)) − βa)`.
    pub fn conditional_recovery_cdf(&self, z: f64, a: f64) -> Result<f64> {
        let u = norm_cdf(z);
        if u <= 0.0 {
            return Ok(0.0);
        }
        if u >= 1.0 {
            return Ok(1.0);
        }
        Ok(self.model.base.cdf(self.inverse(u)? - self.model.beta * a))
    }
}

/// One simulated name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointSample {
    pub index: usize,
    /// Which draw of the common factor this name belongs to.
    pub block: usize,
    pub defaulted: bool,
    /// Realised recovery, only for defaulted names.
    pub recovery: Option<f64>,
}

/// Simulate `n` names; consecutive groups of `names_per_factor` share one
/// draw of the factor. Deterministic for a given seed.
pub fn sample_joint(
    model: &FactorModel,
    recovery: &RecoveryParams,
    n: usize,
    names_per_factor: usize,
    seed: u64,
    rule: &QuadratureRule,
) -> Result<Vec<JointSample>> {
    if n == 0 || names_per_factor == 0 {
        return Err(Error::domain("need at least one name and one name per factor draw"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut a = 0.0;
    let mut pd = 0.0;
    for index in 0..n {
        let block = index / names_per_factor;
        if index % names_per_factor == 0 {
            a = rng.sample(StandardNormal);
            pd = model.conditional_pd(a);
        }
        let u: f64 = rng.random();
        let eps = model.base.sample(&mut rng);
        let defaulted = u < pd;
        let recovery = if defaulted {
            Some(recovery.recovery_at(z_of(model, eps + model.beta * a, rule)?))
        } else {
            None
        };
        out.push(JointSample {
            index,
            block,
            defaulted,
            recovery,
        });
    }
    Ok(out)
}
