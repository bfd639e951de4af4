//! The multivariate sequential rank order process and its relation to the
//! copula quantics.
//!
//! `A_n(s, u) = [ns]/sqrt(n) * (1/[ns] sum_{j<=[ns]} R_j(u) - 1/n sum_{j<=n} R_j(u))`
//! with `R_j(u) = prod_i 1{U_ij <= u_i}`. On the grid `n u_i in Z` it equals
//! `-1/sqrt(n) sum_{j<=[ns]} (C_n(u) - 1{X_j <= F^-1(u)})`, where `F^-1` is
//! the componentwise empirical quantile function of the raw data.

use crate::error::{Error, Result};
use crate::spearman::survival_product;
use crate::types::{PseudoObservations, Sample};

/// `[n s]`, snapping to the nearest integer when `n s` is within rounding
/// distance of it so that `s = k / n` always maps back to `k`.
pub fn prefix_len(n: usize, s: f64) -> usize {
    let t = n as f64 * s.clamp(0.0, 1.0);
    let r = t.round();
    let k = if (t - r).abs() < 1e-9 { r } else { t.floor() };
    (k as usize).min(n)
}

fn below(row: &[f64], u: &[f64]) -> bool {
    row.iter().zip(u).all(|(x, c)| x <= c)
}

pub fn rank_order_process(pseudo: &PseudoObservations, s: f64, u: &[f64]) -> Result<f64> {
    let (n, d) = (pseudo.n(), pseudo.d());
    if u.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.len(),
        });
    }
    let k = prefix_len(n, s);
    if k == 0 {
        return Ok(0.0);
    }
    let hits: Vec<bool> = pseudo.rows().map(|r| below(r, u)).collect();
    let prefix = hits[..k].iter().filter(|&&h| h).count() as f64;
    let total = hits.iter().filter(|&&h| h).count() as f64;
    let (nf, kf) = (n as f64, k as f64);
    Ok(kf / nf.sqrt() * (prefix / kf - total / nf))
}

fn check_grid(n: usize, u: &[f64]) -> Result<Vec<usize>> {
    u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let scaled = n as f64 * ui;
            let m = scaled.round();
            if !(0.0..=1.0).contains(&ui) || (scaled - m).abs() > 1e-9 {
                Err(Error::GridViolation {
                    coord: i + 1,
                    scaled,
                })
            } else {
                Ok(m as usize)
            }
        })
        .collect()
}

/// Negated partial sum of quantics, built from raw observations through the
/// empirical quantile function. `data` is row-major `n x d`.
fn quantics_sum(n: usize, d: usize, data: &[f64], s: f64, u: &[f64]) -> Result<f64> {
    let grid = check_grid(n, u)?;
    // F^-1(m/n) is the m-th order statistic; m = 0 maps below every observation
    let thresholds: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            if m == 0 {
                f64::NEG_INFINITY
            } else {
                let mut col: Vec<f64> = (0..n).map(|j| data[j * d + i]).collect();
                col.sort_by(f64::total_cmp);
                col[m - 1]
            }
        })
        .collect();
    let indicator: Vec<f64> = data
        .chunks_exact(d)
        .map(|row| if below(row, &thresholds) { 1.0 } else { 0.0 })
        .collect();
    let copula = indicator.iter().sum::<f64>() / n as f64;
    let k = prefix_len(n, s);
    let partial: f64 = indicator[..k].iter().map(|ind| copula - ind).sum();
    Ok(-partial / (n as f64).sqrt())
}

/// Quantics form of `A_n(s, u)` computed from raw observations.
pub fn quantics_process(sample: &Sample, s: f64, u: &[f64]) -> Result<f64> {
    if u.len() != sample.d() {
        return Err(Error::DimensionMismatch {
            expected: sample.d(),
            found: u.len(),
        });
    }
    quantics_sum(sample.n(), sample.d(), sample.as_row_major(), s, u)
}

/// Checks `A_n(s, u)` against the quantics partial sum at a grid point.
///
/// The pseudo-observations themselves serve as the raw data for the
/// quantile route; any tie-free sample has the same ranks.
pub fn quantics_identity_check(pseudo: &PseudoObservations, s: f64, u: &[f64]) -> Result<bool> {
    let (n, d) = (pseudo.n(), pseudo.d());
    if u.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.len(),
        });
    }
    let data: Vec<f64> = pseudo.rows().flatten().copied().collect();
    let via_quantics = quantics_sum(n, d, &data, s, u)?;
    let direct = rank_order_process(pseudo, s, u)?;
    Ok((direct - via_quantics).abs() <= 1e-12)
}

/// `int_{[0,1]^d} A_n(k/n, u) du` in closed form.
///
/// Each indicator integrates to `prod_i (1 - U_ij)`, so the integral is a
/// centered partial sum of survival products.
pub fn integrated_rank_order_process(pseudo: &PseudoObservations, k: usize) -> f64 {
    let n = pseudo.n();
    let k = k.min(n);
    let mut prefix = 0.0;
    let mut total = 0.0;
    for (j, row) in pseudo.rows().enumerate() {
        let p = survival_product(row);
        if j < k {
            prefix += p;
        }
        total += p;
    }
    (prefix - k as f64 / n as f64 * total) / (n as f64).sqrt()
}
