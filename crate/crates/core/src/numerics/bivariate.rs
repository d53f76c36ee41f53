//! Bivariate normal CDF after Genz's BVND (Drezner-Wesolowsky with
//! double-precision modifications for |rho| close to 1).

use std::f64::consts::PI;

use super::normal::norm_cdf;
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705, -0.9324695142031522),
    (0.3607615730481384, -0.6612093864662647),
    (0.4679139345726904, -0.2386191860831970),
];

#[allow(clippy::excessive_precision)]
const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-01, -0.9815606342467191),
    (0.1069393259953183, -0.9041172563704750),
    (0.1600783285433464, -0.7699026741943050),
    (0.2031674267230659, -0.5873179542866171),
    (0.2334925365383547, -0.3678314989981802),
    (0.2491470458134029, -0.1252334085114692),
];

#[allow(clippy::excessive_precision)]
const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-01, -0.9931285991850949),
    (0.4060142980038694e-01, -0.9639719272779138),
    (0.6267204833410906e-01, -0.9122344282513259),
    (0.8327674157670475e-01, -0.8391169718222188),
    (0.1019301198172404, -0.7463319064601508),
    (0.1181945319615184, -0.6360536807265150),
    (0.1316886384491766, -0.5108670019508271),
    (0.1420961093183821, -0.3737060887154196),
    (0.1491729864726037, -0.2277858511416451),
    (0.1527533871307259, -0.7652652113349733e-01),
];

/// P[X < x, Y < y] for standard normals with correlation `rho`.
pub fn binorm_cdf(x: f64, y: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::domain(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    if x.is_nan() || y.is_nan() {
        return Err(Error::domain("binorm_cdf argument is NaN"));
    }
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(norm_cdf(y));
    }
    if y == f64::INFINITY {
        return Ok(norm_cdf(x));
    }
    if rho == 1.0 {
        return Ok(norm_cdf(x.min(y)));
    }
    if rho == -1.0 {
        return Ok((norm_cdf(x) - norm_cdf(-y)).max(0.0));
    }
    Ok(upper_orthant(-x, -y, rho).clamp(0.0, 1.0))
}

/// P[X > h, Y > k].
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    if r.abs() < 0.925 {
        let nodes: &[(f64, f64)] = if r.abs() < 0.3 {
            &GL6
        } else if r.abs() < 0.75 {
            &GL12
        } else {
            &GL20
        };
        let mut bvn = 0.0;
        if r != 0.0 {
            let hk = h * k;
            let hs = 0.5 * (h * h + k * k);
            let asr = r.asin();
            for &(w, x) in nodes {
                for s in [-1.0, 1.0] {
                    let sn = (0.5 * asr * (s * x + 1.0)).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn *= asr / (4.0 * PI);
        }
        bvn + norm_cdf(-h) * norm_cdf(-k)
    } else if r < 0.0 {
        // reflect Y -> -Y onto the positive-correlation branch
        norm_cdf(-h) - upper_orthant(h, -k, -r)
    } else {
        near_one(h, k, r)
    }
}

/// Upper orthant for 0.925 <= r < 1.
fn near_one(h: f64, k: f64, r: f64) -> f64 {
    let hk = h * k;
    let a_s = (1.0 - r) * (1.0 + r);
    let mut a = a_s.sqrt();
    let b_s = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 16.0;
    let mut bvn = 0.0;
    let asr = -0.5 * (b_s / a_s + hk);
    if asr > -100.0 {
        bvn = a * asr.exp() * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
    }
    if -hk < 100.0 {
        let b = b_s.sqrt();
        bvn -= (-0.5 * hk).exp()
            * (2.0 * PI).sqrt()
            * norm_cdf(-b / a)
            * b
            * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
    }
    a *= 0.5;
    for &(w, x) in &GL20 {
        for s in [-1.0, 1.0] {
            let xs = (a * (s * x + 1.0)).powi(2);
            let rs = (1.0 - xs).sqrt();
            let asr = -0.5 * (b_s / xs + hk);
            if asr > -100.0 {
                bvn += a
                    * w
                    * asr.exp()
                    * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs - (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
    }
    -bvn / (2.0 * PI) + norm_cdf(-h.max(k))
}
