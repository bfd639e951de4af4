//! Distribution of `sup_{s in [0,1]} |B(s)|` for a standard Brownian bridge.
//!
//! Two equivalent series are used, each where it converges fastest:
//!
//! ```text
//! P(sup|B| <= x) = 1 - 2 sum_{k>=1} (-1)^{k+1} exp(-2 k^2 x^2)             (x >= 1)
//!                = sqrt(2 pi) / x * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2))  (x < 1)
//! ```
//!
//! The upper tail is summed directly so that tiny p-values keep their
//! relative precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const TERM_TOL: f64 = 1e-12;
const SWITCH: f64 = 1.0;
const MAX_TERMS: usize = 10_000;

/// Alternating upper-tail series `2 sum (-1)^{k+1} exp(-2 k^2 x^2)`.
pub(crate) fn tail_series(x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < TERM_TOL * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    2.0 * sum
}

/// Jacobi-theta form of the CDF, accurate for small `x`.
pub(crate) fn theta_series(x: f64) -> f64 {
    let c = PI * PI / (8.0 * x * x);
    let mut sum = 0.0;
    for k in 1..=MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let term = (-odd * odd * c).exp();
        sum += term;
        if term < TERM_TOL * sum.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (2.0 * PI).sqrt() / x * sum
}

pub fn kolmogorov_sup_cdf(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 0.0;
    }
    let v = if x < SWITCH {
        theta_series(x)
    } else {
        1.0 - tail_series(x)
    };
    v.clamp(0.0, 1.0)
}

/// Upper tail `P(sup|B| > x)`; this is the p-value of an observed statistic.
pub fn kolmogorov_sup_sf(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 1.0;
    }
    let v = if x < SWITCH {
        1.0 - theta_series(x)
    } else {
        tail_series(x)
    };
    v.clamp(0.0, 1.0)
}

/// Upper `alpha` quantile of `sup|B|`, by bisection on `[1e-6, 10]`.
pub fn critical_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let (mut lo, mut hi) = (1e-6, 10.0);
    // the tail is decreasing, so keep sf(lo) > alpha >= sf(hi)
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sup_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
