//! Shared domain types: the validated sample, its pseudo-observations, test
//! configuration and the outcome record returned by both fluctuation tests.
//!
//! Matrices are stored row-major with rows indexing time (`j = 1..n`) and
//! columns indexing components (`i = 1..d`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lrv::KernelKind;

/// A validated `n x d` matrix of finite observations, `n >= 2`, `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample from time-ordered rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        validate_sample(rows)
    }

    /// Builds a sample from a row-major buffer.
    pub fn from_row_major(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: values.len(),
            });
        }
        check_shape(n, d)?;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: pos / d + 1,
                col: pos % d + 1,
            });
        }
        Ok(Self { n, d, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Row `j` (0-based).
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// Copy of column `i` (0-based).
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy with `f` applied to every entry of column `i`.
    ///
    /// Fails if `f` produces a non-finite value.
    pub fn map_column<F: Fn(f64) -> f64>(&self, i: usize, f: F) -> Result<Self> {
        let mut values = self.values.clone();
        for row in values.chunks_exact_mut(self.d) {
            row[i] = f(row[i]);
        }
        Self::from_row_major(self.n, self.d, values)
    }

    /// Keeps only the given (0-based) columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.d) {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: bad + 1,
            });
        }
        let values = self
            .rows()
            .flat_map(|r| cols.iter().map(move |&c| r[c]))
            .collect();
        Self::from_row_major(self.n, cols.len(), values)
    }

    /// Overwrites row `j` (0-based).
    pub(crate) fn set_row(&mut self, j: usize, row: &[f64]) {
        self.values[j * self.d..(j + 1) * self.d].copy_from_slice(row);
    }
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if d < 2 {
        return Err(Error::TooFewColumns(d));
    }
    Ok(())
}

/// Checks shape and finiteness of a raw row list and copies it into a [`Sample`].
pub fn validate_sample<R: AsRef<[f64]>>(raw: &[R]) -> Result<Sample> {
    let n = raw.len();
    let d = raw.first().map_or(0, |r| r.as_ref().len());
    for (j, row) in raw.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != d {
            return Err(Error::RaggedRow {
                row: j + 1,
                found: row.len(),
                expected: d,
            });
        }
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: j + 1, col: i + 1 });
        }
    }
    check_shape(n, d)?;
    let values = raw.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
    Ok(Sample { n, d, values })
}

/// Normalized ranks `rank(X_ij) / n`, one column per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    n: usize,
    d: usize,
    u: Vec<f64>,
    tie_counts: Vec<usize>,
}

impl PseudoObservations {
    /// Wraps a row-major matrix of pseudo-observations.
    ///
    /// Every entry must lie in `(0, 1]`. Only `n >= 1` is required, so that
    /// degenerate one-row inputs can be fed to the estimators directly.
    pub fn new(n: usize, d: usize, u: Vec<f64>, tie_counts: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewRows(0));
        }
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if u.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: u.len(),
            });
        }
        if tie_counts.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: tie_counts.len(),
            });
        }
        if let Some(pos) = u.iter().position(|&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::PseudoOutOfRange {
                row: pos / d + 1,
                col: pos % d + 1,
                value: u[pos],
            });
        }
        Ok(Self { n, d, u, tie_counts })
    }

    /// Builds tie-free pseudo-observations from integer ranks (`1..=n` per column).
    pub fn from_rank_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let u = rows
            .iter()
            .flat_map(|r| r.iter().map(|&k| k as f64 / n as f64))
            .collect();
        Self::new(n, d, u, vec![0; d])
    }

    pub(crate) fn from_parts(n: usize, d: usize, u: Vec<f64>, tie_counts: Vec<usize>) -> Self {
        Self { n, d, u, tie_counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.u[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.u.chunks_exact(self.d)
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    /// Number of tied pairs in each column.
    pub fn tie_counts(&self) -> &[usize] {
        &self.tie_counts
    }

    pub fn has_ties(&self) -> bool {
        self.tie_counts.iter().any(|&t| t > 0)
    }
}

/// Lag truncation parameter `gamma_n` for the long-run variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bandwidth {
    /// `floor(ln n)`.
    Auto,
    Fixed(f64),
}

impl Bandwidth {
    pub fn resolve(self, n: usize) -> Result<f64> {
        match self {
            Bandwidth::Auto => Ok(crate::lrv::default_bandwidth(n)),
            Bandwidth::Fixed(b) if b.is_finite() && b >= 0.0 => Ok(b),
            Bandwidth::Fixed(b) => Err(Error::InvalidBandwidth(b)),
        }
    }
}

impl std::fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bandwidth::Auto => f.write_str("auto"),
            Bandwidth::Fixed(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestConfig {
    pub kernel: KernelKind,
    pub bandwidth: Bandwidth,
    pub alpha: f64,
    /// Smallest prefix length entering the maximum. `1` scans every prefix.
    pub min_k: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Bartlett,
            bandwidth: Bandwidth::Auto,
            alpha: 0.05,
            min_k: 1,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(self.alpha));
        }
        if let Bandwidth::Fixed(b) = self.bandwidth {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidBandwidth(b));
            }
        }
        Ok(())
    }
}

/// Result of a fluctuation test.
///
/// `trace`, `rho_path` are indexed by prefix length `k = 1..n` stored at
/// position `k - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic_w: f64,
    pub p_value: f64,
    /// Prefix length `k` (1-based) at which `|trace|` is maximal. Smallest on ties.
    pub argmax_k: usize,
    pub trace: Vec<f64>,
    /// Long-run variance estimate; the trace is scaled by its inverse square root.
    pub d_hat_prime: f64,
    /// Successive correlation estimates. For the Pearson test the first entry is NaN.
    pub rho_path: Vec<f64>,
    pub bandwidth: f64,
    pub alpha: f64,
    /// Tied pairs per column; nonzero counts are a warning, not a failure.
    pub tie_counts: Vec<usize>,
}

impl TestOutcome {
    pub fn n(&self) -> usize {
        self.trace.len()
    }

    pub fn rejects(&self) -> bool {
        self.p_value < self.alpha
    }

    pub fn has_ties(&self) -> bool {
        self.tie_counts.iter().any(|&t| t > 0)
    }
}

/// Maximum of `|trace[k-1]|` over `k >= min_k`, with the smallest maximizing `k`.
pub(crate) fn abs_max(trace: &[f64], min_k: usize) -> (f64, usize) {
    let start = min_k.clamp(1, trace.len()) - 1;
    let mut best = (f64::NEG_INFINITY, start + 1);
    for (idx, v) in trace.iter().enumerate().skip(start) {
        if v.abs() > best.0 {
            best = (v.abs(), idx + 1);
        }
    }
    best
}
