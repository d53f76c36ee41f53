use std::f64::consts::PI;
use std::sync::Arc;

use super::normal::norm_pdf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussHermite,
    AdaptiveSimpson,
}

/// How expectations over a standard normal variable are computed.
///
/// Gauss-Hermite rules integrate over the whole line with `node_count`
/// nodes; truncated ranges (payoffs split at their exercise boundary) fall
/// back to composite Gauss-Legendre panels of width at most
/// [`QuadratureRule::PANEL_WIDTH`] with `node_count` nodes each, cut off at
/// `±z_bound`. The adaptive Simpson scheme uses `node_count` initial panels
/// on `[-z_bound, z_bound]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    node_count: usize,
    scheme: Scheme,
    z_bound: f64,
    nodes: Arc<[f64]>,
    weights: Arc<[f64]>,
    legendre_nodes: Arc<[f64]>,
    legendre_weights: Arc<[f64]>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::gauss_hermite(128).expect("128-node rule is valid")
    }
}

impl QuadratureRule {
    pub const MIN_NODES: usize = 16;
    pub const PANEL_WIDTH: f64 = 4.0;
    pub const DEFAULT_Z_BOUND: f64 = 14.0;
    const SIMPSON_TOL: f64 = 1e-14;

    pub fn gauss_hermite(node_count: usize) -> Result<Self> {
        Self::new(node_count, Scheme::GaussHermite, Self::DEFAULT_Z_BOUND)
    }

    pub fn adaptive_simpson(node_count: usize, z_bound: f64) -> Result<Self> {
        Self::new(node_count, Scheme::AdaptiveSimpson, z_bound)
    }

    pub fn new(node_count: usize, scheme: Scheme, z_bound: f64) -> Result<Self> {
        if node_count < Self::MIN_NODES {
            return Err(Error::domain(format!(
                "quadrature needs at least {} nodes, got {node_count}",
                Self::MIN_NODES
            )));
        }
        if z_bound < 6.0 || !z_bound.is_finite() {
            return Err(Error::domain(format!("z_bound must be >= 6, got {z_bound}")));
        }
        let (nodes, weights) = match scheme {
            Scheme::GaussHermite => gauss_hermite_nodes(node_count),
            Scheme::AdaptiveSimpson => (Vec::new(), Vec::new()),
        };
        let (legendre_nodes, legendre_weights) = match scheme {
            Scheme::GaussHermite => gauss_legendre_nodes(node_count),
            Scheme::AdaptiveSimpson => (Vec::new(), Vec::new()),
        };
        Ok(QuadratureRule {
            node_count,
            scheme,
            z_bound,
            nodes: nodes.into(),
            weights: weights.into(),
            legendre_nodes: legendre_nodes.into(),
            legendre_weights: legendre_weights.into(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn z_bound(&self) -> f64 {
        self.z_bound
    }
}

fn checked(f: &impl Fn(f64) -> f64, z: f64) -> Result<f64> {
    let v = f(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { at: z, value: v })
    }
}

/// E[f(Z)] for Z ~ N(0, 1).
pub fn integrate_gaussian(f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> Result<f64> {
    match rule.scheme {
        Scheme::GaussHermite => {
            let mut sum = 0.0;
            for (&z, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                sum += w * checked(&f, z)?;
            }
            Ok(sum)
        }
        Scheme::AdaptiveSimpson => integrate_gaussian_range(f, f64::NEG_INFINITY, f64::INFINITY, rule),
    }
}

/// ∫_lo^hi f(z) φ(z) dz; infinite limits are cut at the rule's `z_bound`.
pub fn integrate_gaussian_range(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rule: &QuadratureRule) -> Result<f64> {
    let lo = lo.max(-rule.z_bound);
    let hi = hi.min(rule.z_bound);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let g = |z: f64| -> Result<f64> { Ok(checked(&f, z)? * norm_pdf(z)) };
    match rule.scheme {
        Scheme::GaussHermite => {
            let panels = ((hi - lo) / QuadratureRule::PANEL_WIDTH).ceil().max(1.0) as usize;
            let width = (hi - lo) / panels as f64;
            let mut sum = 0.0;
            for p in 0..panels {
                let a = lo + p as f64 * width;
                let mut panel = 0.0;
                for (&t, &w) in rule.legendre_nodes.iter().zip(rule.legendre_weights.iter()) {
                    panel += w * g(a + 0.5 * width * (t + 1.0))?;
                }
                sum += 0.5 * width * panel;
            }
            Ok(sum)
        }
        Scheme::AdaptiveSimpson => {
            let panels = rule.node_count;
            let width = (hi - lo) / panels as f64;
            let tol = QuadratureRule::SIMPSON_TOL / panels as f64;
            let mut sum = 0.0;
            for p in 0..panels {
                let a = lo + p as f64 * width;
                let b = a + width;
                let m = 0.5 * (a + b);
                let (fa, fm, fb) = (g(a)?, g(m)?, g(b)?);
                let whole = width / 6.0 * (fa + 4.0 * fm + fb);
                sum += simpson_step(&g, a, b, fa, fm, fb, whole, tol, 48)?;
            }
            Ok(sum)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    g: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?;
    let frm = g(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Nodes and weights for E[f(Z)], Z ~ N(0,1) (probabilists' Hermite).
///
/// Golub-Welsch eigenvalues of the Jacobi matrix seed a Newton polish on the
/// orthonormal (physicists') Hermite recurrence; weights come from the
/// polished derivative, which keeps tiny tail weights accurate.
pub fn gauss_hermite_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for guess in jacobi_eigenvalues(n) {
        // physicists' variable
        let mut z = guess / std::f64::consts::SQRT_2;
        for _ in 0..20 {
            let (p1, p2) = hermite_orthonormal(n, z, pim4);
            let step = p1 / ((2.0 * nf).sqrt() * p2);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p2) = hermite_orthonormal(n, z, pim4);
        let pp = (2.0 * nf).sqrt() * p2;
        nodes.push(z * std::f64::consts::SQRT_2);
        weights.push(2.0 / (pp * pp) / PI.sqrt());
    }
    (nodes, weights)
}

/// Eigenvalues (ascending) of the symmetric tridiagonal Jacobi matrix of the
/// probabilists' Hermite polynomials: zero diagonal, off-diagonal sqrt(k).
fn jacobi_eigenvalues(n: usize) -> Vec<f64> {
    let mut d = vec![0.0f64; n];
    let mut e: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        for _ in 0..200 {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Returns (h_n(z), h_{n-1}(z)) for the orthonormal Hermite polynomials
/// without the Gaussian factor.
fn hermite_orthonormal(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
            let (p1, p2) = legendre(n, z);
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (p1, p2) = legendre(n, z);
        if z * z != 1.0 {
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}
