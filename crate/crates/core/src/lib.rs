//! CUSUM-type fluctuation tests for a constant rank correlation in
//! multivariate time series.
//!
//! The main entry point is [`spearman_constancy_test`]: it ranks each
//! component, tracks the sequential multivariate Spearman's rho, scales the
//! centered partial-sum path by a kernel long-run variance and compares the
//! maximum against the supremum of a Brownian bridge. [`bpc_test`] is the
//! analogous test built on successive Pearson correlations, and
//! [`simulate`] contains the Monte Carlo engine used to study size, power
//! and robustness.

pub mod bpc;
pub mod error;
pub mod lrv;
pub mod ranks;
pub mod sctest;
pub mod simulate;
pub mod spearman;
pub mod types;

pub use bpc::{bpc_test, pearson_path};
pub use error::{Error, Result};
pub use lrv::{default_bandwidth, kernel_weight, long_run_variance, KernelKind};
pub use ranks::pseudo_observations;
pub use sctest::{
    critical_value, kolmogorov_sup_cdf, kolmogorov_sup_sf, quantics_identity_check,
    rank_order_process, spearman_constancy_test,
};
pub use spearman::{h_factor, rho_path, RhoPath};
pub use types::{validate_sample, Bandwidth, PseudoObservations, Sample, TestConfig, TestOutcome};
