use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::simulate::mvt::InnovationSpec;
use crate::types::Sample;

/// How the target correlation evolves over the innovation index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakProfile {
    None,
    /// `rho0` for `eps_0..=eps_{ceil(tau n)}`, `rho1` afterwards.
    AbruptAtFraction(f64),
    /// `rho(j / n)` interpolated linearly from `rho0` at `j = 0` to `rho1` at `j = n`.
    LinearDrift,
}

/// Mapping from a target cross-correlation of the MA(1) output to the
/// innovation shape parameter `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QFormula {
    /// `q = rho * sqrt((1 + t1^2)(1 + t2^2)) / (1 + t1 t2)`; makes the output
    /// correlation equal `rho` exactly.
    #[default]
    Exact,
    /// `q = rho * sqrt((1 + t1^2)(1 + t2^2) / (1 + t1 t2))`, kept for
    /// comparison with previously published tables.
    Printed,
}

impl QFormula {
    pub fn name(self) -> &'static str {
        match self {
            QFormula::Exact => "exact",
            QFormula::Printed => "printed",
        }
    }
}

/// Replaces row `position` (1-based) with `values` after filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct Outlier {
    pub position: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub n: usize,
    pub d: usize,
    /// Degrees of freedom of the innovations; infinity for Gaussian.
    pub nu: f64,
    /// Diagonal of the MA(1) coefficient matrix.
    pub theta: Vec<f64>,
    pub rho0: f64,
    pub rho1: f64,
    pub break_profile: BreakProfile,
    pub contamination: Vec<Outlier>,
    /// Number of `(y, -y)` outliers placed at random in the second half of
    /// every replication.
    pub strong_outliers: usize,
    pub q_formula: QFormula,
    pub seed: u64,
}

impl Scenario {
    /// Bivariate, serially independent, no break, no contamination.
    pub fn null(n: usize, nu: f64, rho: f64) -> Self {
        Self {
            label: String::new(),
            n,
            d: 2,
            nu,
            theta: vec![0.0, 0.0],
            rho0: rho,
            rho1: rho,
            break_profile: BreakProfile::None,
            contamination: Vec::new(),
            strong_outliers: 0,
            q_formula: QFormula::Exact,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewRows(self.n));
        }
        if self.d < 2 {
            return Err(Error::DimensionTooSmall(self.d));
        }
        if self.theta.len() != self.d {
            return Err(Error::InvalidScenario(format!(
                "theta has {} entries for dimension {}",
                self.theta.len(),
                self.d
            )));
        }
        if let BreakProfile::AbruptAtFraction(tau) = self.break_profile {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidScenario(format!(
                    "break fraction {tau} is outside (0, 1)"
                )));
            }
        }
        for o in &self.contamination {
            if o.position == 0 || o.position > self.n {
                return Err(Error::InvalidScenario(format!(
                    "outlier position {} outside 1..={}",
                    o.position, self.n
                )));
            }
            if o.values.len() != self.d || o.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidScenario(format!(
                    "outlier at {} must have {} finite values",
                    o.position, self.d
                )));
            }
        }
        if self.strong_outliers > 0 && self.d != 2 {
            return Err(Error::InvalidScenario(
                "strong contamination requires d = 2".into(),
            ));
        }
        if self.strong_outliers > self.n - self.n / 2 {
            return Err(Error::TooManyOutliers {
                count: self.strong_outliers,
                available: self.n - self.n / 2,
            });
        }
        Ok(())
    }

    /// Target correlation for innovation `eps_j`, `j = 0..=n`.
    fn rho_at(&self, j: usize) -> f64 {
        match self.break_profile {
            BreakProfile::None => self.rho0,
            BreakProfile::AbruptAtFraction(tau) => {
                let last_before = (tau * self.n as f64).ceil() as usize;
                if j <= last_before {
                    self.rho0
                } else {
                    self.rho1
                }
            }
            BreakProfile::LinearDrift => {
                let s = j as f64 / self.n as f64;
                self.rho0 + s * (self.rho1 - self.rho0)
            }
        }
    }

    /// Innovation law for a target output correlation.
    pub fn innovation_spec(&self, rho: f64) -> Result<InnovationSpec> {
        let d = self.d;
        let mut shape = vec![1.0; d * d];
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    shape[a * d + b] = q_from_rho(rho, self.theta[a], self.theta[b], self.q_formula)?;
                }
            }
        }
        InnovationSpec::new(self.nu, d, &shape)
    }
}

pub fn q_from_rho(rho: f64, theta1: f64, theta2: f64, formula: QFormula) -> Result<f64> {
    let a = (1.0 + theta1 * theta1) * (1.0 + theta2 * theta2);
    let b = 1.0 + theta1 * theta2;
    let q = match formula {
        QFormula::Exact => rho * a.sqrt() / b,
        QFormula::Printed => rho * (a / b).sqrt(),
    };
    if q.is_nan() || q.abs() >= 1.0 {
        return Err(Error::ShapeOutOfRange(q));
    }
    Ok(q)
}

/// Draws one path `X_t = eps_t + theta eps_{t-1}`, `t = 1..=n`, then applies
/// the scenario's fixed outliers.
pub fn gen_path<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<Sample> {
    scenario.validate()?;
    let (n, d) = (scenario.n, scenario.d);

    let before = scenario.innovation_spec(scenario.rho0)?;
    let after = match scenario.break_profile {
        BreakProfile::AbruptAtFraction(_) => Some(scenario.innovation_spec(scenario.rho1)?),
        _ => None,
    };

    let mut eps = vec![0.0; (n + 1) * d];
    for (j, slot) in eps.chunks_exact_mut(d).enumerate() {
        match scenario.break_profile {
            BreakProfile::None => before.sample_into(rng, slot),
            BreakProfile::AbruptAtFraction(_) => {
                let spec = if scenario.rho_at(j) == scenario.rho0 {
                    &before
                } else {
                    after.as_ref().expect("abrupt profile has a second law")
                };
                spec.sample_into(rng, slot);
            }
            BreakProfile::LinearDrift => {
                scenario.innovation_spec(scenario.rho_at(j))?.sample_into(rng, slot);
            }
        }
    }

    let mut values = Vec::with_capacity(n * d);
    for t in 1..=n {
        for i in 0..d {
            values.push(eps[t * d + i] + scenario.theta[i] * eps[(t - 1) * d + i]);
        }
    }
    let mut sample = Sample::from_row_major(n, d, values)?;
    for o in &scenario.contamination {
        sample.set_row(o.position - 1, &o.values);
    }
    Ok(sample)
}

/// Places `count` outliers `(y, -y)` at distinct random rows in the second
/// half `(n/2, n]`, with `|y|` uniform on `[100, 1000]` and a random sign.
pub fn strong_contamination<R: Rng + ?Sized>(
    sample: &Sample,
    count: usize,
    rng: &mut R,
) -> Result<Sample> {
    if sample.d() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: sample.d(),
        });
    }
    let n = sample.n();
    let first = n / 2;
    let available = n - first;
    if count > available {
        return Err(Error::TooManyOutliers { count, available });
    }
    let mut out = sample.clone();
    for offset in index::sample(rng, available, count) {
        let magnitude = rng.random_range(100.0..=1000.0);
        let y = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        out.set_row(first + offset, &[y, -y]);
    }
    Ok(out)
}
