//! Kernel-weighted long-run variance of the survival products.
//!
//! With `P_j = prod_i (1 - U_ij)` and `Pbar` their mean, the estimator is
//!
//! ```text
//! D' = h(d)^2 4^d { (1/n) sum P_j^2 - Pbar^2
//!                   + 2 sum_{m=1}^{n-1} k(m / gamma) [ (1/n) sum_{j=1}^{n-m} P_j P_{j+m} - Pbar^2 ] }
//! ```
//!
//! Every lag term subtracts the full `Pbar^2`, not `(n - m)/n * Pbar^2`.
//! The scaling factor of the fluctuation process is `1 / sqrt(D')`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spearman::h_factor;

/// Values at or below this are reported as [`Error::DegenerateVariance`].
pub const DEGENERATE_EPS: f64 = 1e-12;

/// HAC kernels from Andrews' class K2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KernelKind {
    Bartlett,
    Parzen,
    QuadraticSpectral,
}

impl KernelKind {
    pub const ALL: [KernelKind; 3] = [
        KernelKind::Bartlett,
        KernelKind::Parzen,
        KernelKind::QuadraticSpectral,
    ];

    /// Whether `k(x) = 0` for all `x > 1`.
    pub fn has_compact_support(self) -> bool {
        !matches!(self, KernelKind::QuadraticSpectral)
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Bartlett => "bartlett",
            KernelKind::Parzen => "parzen",
            KernelKind::QuadraticSpectral => "qs",
        }
    }

    /// Evaluates the kernel at a nonnegative argument without validation.
    fn eval(self, x: f64) -> f64 {
        match self {
            KernelKind::Bartlett => (1.0 - x).max(0.0),
            KernelKind::Parzen => {
                if x <= 0.5 {
                    1.0 - 6.0 * x * x + 6.0 * x * x * x
                } else if x <= 1.0 {
                    2.0 * (1.0 - x).powi(3)
                } else {
                    0.0
                }
            }
            KernelKind::QuadraticSpectral => {
                let z = 6.0 * PI * x / 5.0;
                if z < 1e-3 {
                    // 3/z^2 (sin z / z - cos z) expanded around 0
                    let z2 = z * z;
                    1.0 - z2 / 10.0 + z2 * z2 / 280.0
                } else {
                    25.0 / (12.0 * PI * PI * x * x) * (z.sin() / z - z.cos())
                }
            }
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bartlett" => Ok(KernelKind::Bartlett),
            "parzen" => Ok(KernelKind::Parzen),
            "qs" | "quadratic-spectral" | "quadraticspectral" => Ok(KernelKind::QuadraticSpectral),
            other => Err(format!("unknown kernel '{other}' (expected bartlett, parzen or qs)")),
        }
    }
}

pub fn kernel_weight(kind: KernelKind, x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeArgument(x));
    }
    Ok(kind.eval(x))
}

/// `floor(ln n)`.
pub fn default_bandwidth(n: usize) -> f64 {
    (n as f64).ln().floor().max(0.0)
}

/// Weight of lag `m >= 1`; all lag weights vanish when `bandwidth == 0`.
pub(crate) fn lag_weight(kind: KernelKind, m: usize, bandwidth: f64) -> f64 {
    if bandwidth == 0.0 {
        0.0
    } else {
        kind.eval(m as f64 / bandwidth)
    }
}

/// Evaluates the estimator without the positivity check.
///
/// Lags whose kernel weight is exactly zero are skipped, so compact-support
/// kernels cost `O(n * bandwidth)`.
pub fn long_run_variance_unchecked(
    products: &[f64],
    kind: KernelKind,
    bandwidth: f64,
    d: usize,
) -> Result<f64> {
    let n = products.len();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if !(bandwidth.is_finite() && bandwidth >= 0.0) {
        return Err(Error::InvalidBandwidth(bandwidth));
    }
    let h = h_factor(d)?;
    let nf = n as f64;
    let mean = products.iter().sum::<f64>() / nf;
    let mean_sq = mean * mean;
    let variance = products.iter().map(|p| p * p).sum::<f64>() / nf - mean_sq;

    let max_lag = if kind.has_compact_support() {
        // k(m / b) = 0 once m >= b
        (bandwidth.ceil() as usize).min(n - 1)
    } else {
        n - 1
    };
    let mut lag_sum = 0.0;
    for m in 1..=max_lag {
        let w = lag_weight(kind, m, bandwidth);
        if w == 0.0 {
            continue;
        }
        let cross: f64 = products[..n - m]
            .iter()
            .zip(&products[m..])
            .map(|(a, b)| a * b)
            .sum();
        lag_sum += w * (cross / nf - mean_sq);
    }
    Ok(h * h * 4f64.powi(d as i32) * (variance + 2.0 * lag_sum))
}

/// Long-run variance `D'`; errors when it is not above [`DEGENERATE_EPS`].
pub fn long_run_variance(
    products: &[f64],
    kind: KernelKind,
    bandwidth: f64,
    d: usize,
) -> Result<f64> {
    let v = long_run_variance_unchecked(products, kind, bandwidth, d)?;
    if v <= DEGENERATE_EPS {
        return Err(Error::DegenerateVariance(v));
    }
    Ok(v)
}
