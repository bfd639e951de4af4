//! Fluctuation test for constant Spearman's rho.
//!
//! The trace is `psi_k = D * k / sqrt(n) * (rho_k - rho_n)` with
//! `D = 1 / sqrt(D')`, and the statistic is `W = max_k |psi_k|`. Under the
//! null of constant rho, `W` converges to the supremum of the absolute value
//! of a Brownian bridge, so p-values come from [`kolmogorov_sup_sf`].

mod kolmogorov;
mod process;

pub use kolmogorov::{critical_value, kolmogorov_sup_cdf, kolmogorov_sup_sf};
pub use process::{
    integrated_rank_order_process, prefix_len, quantics_identity_check, quantics_process,
    rank_order_process,
};

use crate::error::Result;
use crate::lrv::long_run_variance;
use crate::ranks::pseudo_observations;
use crate::spearman::{rho_path, RhoPath};
use crate::types::{abs_max, PseudoObservations, Sample, TestConfig, TestOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationTrace {
    pub psi: Vec<f64>,
    /// `1 / sqrt(D')`.
    pub d_hat: f64,
}

/// Scales the centered partial-sum path of `values` by `d_hat`.
///
/// Shared by the Spearman and Pearson tests. The last entry is exactly zero.
pub fn scaled_trace(values: &[f64], d_hat: f64) -> Vec<f64> {
    let n = values.len();
    let last = values[n - 1];
    let root_n = (n as f64).sqrt();
    values
        .iter()
        .enumerate()
        .map(|(idx, v)| d_hat * ((idx + 1) as f64 / root_n) * (v - last))
        .collect()
}

pub fn fluctuation_trace(path: &RhoPath, d_hat_prime: f64) -> FluctuationTrace {
    let d_hat = 1.0 / d_hat_prime.sqrt();
    FluctuationTrace {
        psi: scaled_trace(&path.values, d_hat),
        d_hat,
    }
}

/// Runs the test on precomputed pseudo-observations.
pub fn spearman_constancy_test_pseudo(
    pseudo: &PseudoObservations,
    config: &TestConfig,
) -> Result<TestOutcome> {
    config.validate()?;
    let n = pseudo.n();
    let bandwidth = config.bandwidth.resolve(n)?;
    let path = rho_path(pseudo);
    let d_hat_prime = long_run_variance(&path.products, config.kernel, bandwidth, pseudo.d())?;
    let trace = fluctuation_trace(&path, d_hat_prime).psi;
    let (statistic_w, argmax_k) = abs_max(&trace, config.min_k);
    Ok(TestOutcome {
        statistic_w,
        p_value: kolmogorov_sup_sf(statistic_w),
        argmax_k,
        trace,
        d_hat_prime,
        rho_path: path.values,
        bandwidth,
        alpha: config.alpha,
        tie_counts: pseudo.tie_counts().to_vec(),
    })
}

pub fn spearman_constancy_test(sample: &Sample, config: &TestConfig) -> Result<TestOutcome> {
    config.validate()?;
    spearman_constancy_test_pseudo(&pseudo_observations(sample), config)
}
