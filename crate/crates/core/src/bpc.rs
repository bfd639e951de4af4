//! Bravais-Pearson comparison test for bivariate samples.
//!
//! The trace is `b_k = D * k / sqrt(n) * (r_k - r_n)`, where `r_k` is the
//! Pearson correlation of the first `k` observations. `D` is the inverse
//! square root of a kernel long-run variance of the first-order
//! linearization of the correlation coefficient,
//!
//! ```text
//! l_t = x_t y_t - r_n / 2 * (x_t^2 + y_t^2)
//! ```
//!
//! with `x_t`, `y_t` standardized by the full-sample mean and standard
//! deviation. This scaling is asymptotically equivalent to the delta-method
//! estimator customarily used with this test but not bit-identical to it.
//! The test assumes finite fourth moments; nothing here checks that.

use crate::error::{Error, Result};
use crate::lrv::{lag_weight, KernelKind, DEGENERATE_EPS};
use crate::sctest::{kolmogorov_sup_sf, scaled_trace};
use crate::types::{abs_max, Sample, TestConfig, TestOutcome};

fn require_bivariate(sample: &Sample) -> Result<()> {
    if sample.d() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: sample.d(),
        });
    }
    Ok(())
}

/// Successive Pearson correlations; entry `k - 1` uses the first `k` rows.
///
/// The first entry is NaN since a single observation has no correlation.
/// Uses Welford-style updates of the centered co-moments.
pub fn pearson_path(sample: &Sample) -> Result<Vec<f64>> {
    require_bivariate(sample)?;
    let mut path = Vec::with_capacity(sample.n());
    let (mut mx, mut my) = (0.0, 0.0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (idx, row) in sample.rows().enumerate() {
        let k = (idx + 1) as f64;
        let (x, y) = (row[0], row[1]);
        let dx = x - mx;
        let dy = y - my;
        mx += dx / k;
        my += dy / k;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
        if idx == 0 {
            path.push(f64::NAN);
            continue;
        }
        if sxx <= 0.0 || syy <= 0.0 {
            return Err(Error::ZeroVariancePrefix(idx + 1));
        }
        path.push(sxy / (sxx * syy).sqrt());
    }
    Ok(path)
}

/// Linearization series `l_t` of the full-sample correlation.
fn linearization(sample: &Sample, r_n: f64) -> Vec<f64> {
    let n = sample.n() as f64;
    let (x, y) = (sample.column(0), sample.column(1));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(&x), mean(&y));
    let sd = |v: &[f64], m: f64| (v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n).sqrt();
    let (sx, sy) = (sd(&x, mx), sd(&y, my));
    x.iter()
        .zip(&y)
        .map(|(a, b)| {
            let (u, v) = ((a - mx) / sx, (b - my) / sy);
            u * v - 0.5 * r_n * (u * u + v * v)
        })
        .collect()
}

/// Kernel long-run variance of a series around its own mean.
pub fn hac_variance(series: &[f64], kind: KernelKind, bandwidth: f64) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if !(bandwidth.is_finite() && bandwidth >= 0.0) {
        return Err(Error::InvalidBandwidth(bandwidth));
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let autocov = |m: usize| -> f64 {
        centered[..n - m]
            .iter()
            .zip(&centered[m..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let max_lag = if kind.has_compact_support() {
        (bandwidth.ceil() as usize).min(n - 1)
    } else {
        n - 1
    };
    let mut v = autocov(0);
    for m in 1..=max_lag {
        let w = lag_weight(kind, m, bandwidth);
        if w != 0.0 {
            v += 2.0 * w * autocov(m);
        }
    }
    Ok(v)
}

pub fn bpc_test(sample: &Sample, config: &TestConfig) -> Result<TestOutcome> {
    config.validate()?;
    require_bivariate(sample)?;
    let n = sample.n();
    let bandwidth = config.bandwidth.resolve(n)?;
    let path = pearson_path(sample)?;
    let r_n = path[n - 1];
    let lrv = hac_variance(&linearization(sample, r_n), config.kernel, bandwidth)?;
    if lrv.is_nan() || lrv <= DEGENERATE_EPS {
        return Err(Error::DegenerateVariance(lrv));
    }
    let mut trace = scaled_trace(&path, 1.0 / lrv.sqrt());
    trace[0] = 0.0;
    let (statistic_w, argmax_k) = abs_max(&trace, config.min_k);
    Ok(TestOutcome {
        statistic_w,
        p_value: kolmogorov_sup_sf(statistic_w),
        argmax_k,
        trace,
        d_hat_prime: lrv,
        rho_path: path,
        bandwidth,
        alpha: config.alpha,
        tie_counts: vec![0, 0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Bandwidth;

    fn sample(rows: &[[f64; 2]]) -> Sample {
        Sample::from_rows(rows).unwrap()
    }

    fn wobbly(n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                [(t * 0.7).sin() + 0.1 * t.cos(), (t * 1.3).cos() + 0.5 * (t * 0.7).sin()]
            })
            .collect()
    }

    #[test]
    fn linear_relations() {
        let up: Vec<[f64; 2]> = (0..10).map(|j| [j as f64, 2.0 * j as f64 + 1.0]).collect();
        let down: Vec<[f64; 2]> = (0..10).map(|j| [j as f64, -(j as f64)]).collect();
        for (rows, want) in [(up, 1.0), (down, -1.0)] {
            let path = pearson_path(&sample(&rows)).unwrap();
            assert!(path[0].is_nan());
            assert!(path[1..].iter().all(|r| (r - want).abs() < 1e-12));
        }
    }

    #[test]
    fn three_point_zero_correlation() {
        let path = pearson_path(&sample(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])).unwrap();
        assert!(path[2].abs() < 1e-15);
    }

    #[test]
    fn matches_two_pass_formula() {
        let rows = wobbly(80);
        let path = pearson_path(&sample(&rows)).unwrap();
        for k in 2..=80 {
            let xs: Vec<f64> = rows[..k].iter().map(|r| r[0]).collect();
            let ys: Vec<f64> = rows[..k].iter().map(|r| r[1]).collect();
            let mx = xs.iter().sum::<f64>() / k as f64;
            let my = ys.iter().sum::<f64>() / k as f64;
            let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
            let syy: f64 = ys.iter().map(|b| (b - my).powi(2)).sum();
            assert!((path[k - 1] - sxy / (sxx * syy).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_prefix_rejected() {
        let err = pearson_path(&sample(&[[1.0, 0.0], [1.0, 2.0], [3.0, 1.0]]));
        assert_eq!(err, Err(Error::ZeroVariancePrefix(2)));
    }

    #[test]
    fn identical_components_are_degenerate() {
        let rows: Vec<[f64; 2]> = wobbly(60).iter().map(|r| [r[0], r[0]]).collect();
        assert!(matches!(
            bpc_test(&sample(&rows), &TestConfig::default()),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn trace_conventions() {
        let out = bpc_test(&sample(&wobbly(120)), &TestConfig::default()).unwrap();
        assert_eq!(out.trace[0], 0.0);
        assert_eq!(out.trace[119], 0.0);
        assert!(out.statistic_w.is_finite());
    }

    #[test]
    fn affine_invariance() {
        let rows = wobbly(150);
        let moved: Vec<[f64; 2]> = rows.iter().map(|r| [3.0 * r[0] - 7.0, 0.25 * r[1] + 100.0]).collect();
        let cfg = TestConfig {
            bandwidth: Bandwidth::Fixed(4.0),
            ..TestConfig::default()
        };
        let a = bpc_test(&sample(&rows), &cfg).unwrap();
        let b = bpc_test(&sample(&moved), &cfg).unwrap();
        for (x, y) in a.trace.iter().zip(&b.trace) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn requires_two_columns() {
        let s = Sample::from_rows(&[[1.0, 2.0, 3.0], [2.0, 1.0, 0.0], [0.0, 5.0, 1.0]]).unwrap();
        assert!(matches!(pearson_path(&s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hac_variance_zero_bandwidth_is_sample_variance() {
        let s = [1.0, 3.0, 2.0, 6.0];
        let v = hac_variance(&s, KernelKind::Parzen, 0.0).unwrap();
        assert!((v - 3.5).abs() < 1e-15);
    }
}
