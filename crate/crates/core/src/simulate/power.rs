use std::fmt::Write as _;
use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bpc::bpc_test;
use crate::error::{Error, Result};
use crate::sctest::spearman_constancy_test;
use crate::simulate::scenario::{gen_path, strong_contamination, Scenario};
use crate::types::TestConfig;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child `index` of `parent`: `splitmix64(parent ^ splitmix64(index))`.
///
/// Presets give scenario `i` the seed `derive_seed(master, i)`; replication
/// `r` of a scenario uses `derive_seed(scenario.seed, r)`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index))
}

pub fn replication_seed(scenario: &Scenario, rep: usize) -> u64 {
    derive_seed(scenario.seed, rep as u64)
}

/// Rejection counts of one test over a batch of replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSummary {
    pub rejections: usize,
    /// Replications where the test ran to completion.
    pub completed: usize,
    pub failed: usize,
}

impl RateSummary {
    /// Rejection frequency among completed replications.
    pub fn rate(&self) -> f64 {
        if self.completed == 0 {
            f64::NAN
        } else {
            self.rejections as f64 / self.completed as f64
        }
    }

    /// `sqrt(p (1 - p) / reps)`.
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.completed as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub label: String,
    pub nu: f64,
    pub n: usize,
    pub d: usize,
    pub rho0: f64,
    pub rho1: f64,
    pub reps: usize,
    pub spearman: RateSummary,
    /// Absent for `d > 2`.
    pub bpc: Option<RateSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerTable {
    /// Free-form `key=value` lines written ahead of the CSV header.
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<PowerRow>,
}

enum Outcome {
    Reject,
    Accept,
    Failed,
}

fn classify(result: Result<bool>) -> Outcome {
    match result {
        Ok(true) => Outcome::Reject,
        Ok(false) => Outcome::Accept,
        Err(_) => Outcome::Failed,
    }
}

fn replicate(scenario: &Scenario, rep: usize, config: &TestConfig) -> (Outcome, Option<Outcome>) {
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(scenario, rep));
    let sample = gen_path(scenario, &mut rng).and_then(|s| {
        if scenario.strong_outliers > 0 {
            strong_contamination(&s, scenario.strong_outliers, &mut rng)
        } else {
            Ok(s)
        }
    });
    let sample = match sample {
        Ok(s) => s,
        Err(_) => {
            let bpc = (scenario.d == 2).then_some(Outcome::Failed);
            return (Outcome::Failed, bpc);
        }
    };
    let spearman = classify(spearman_constancy_test(&sample, config).map(|o| o.rejects()));
    let bpc = (scenario.d == 2).then(|| classify(bpc_test(&sample, config).map(|o| o.rejects())));
    (spearman, bpc)
}

fn tally(outcomes: impl Iterator<Item = Outcome>) -> RateSummary {
    let mut s = RateSummary {
        rejections: 0,
        completed: 0,
        failed: 0,
    };
    for o in outcomes {
        match o {
            Outcome::Reject => {
                s.rejections += 1;
                s.completed += 1;
            }
            Outcome::Accept => s.completed += 1,
            Outcome::Failed => s.failed += 1,
        }
    }
    s
}

fn run_scenario(scenario: &Scenario, reps: usize, config: &TestConfig) -> PowerRow {
    let outcomes: Vec<(Outcome, Option<Outcome>)> = (0..reps)
        .into_par_iter()
        .map(|rep| replicate(scenario, rep, config))
        .collect();
    let (spearman, bpc): (Vec<Outcome>, Vec<Option<Outcome>>) = outcomes.into_iter().unzip();
    let bpc = (scenario.d == 2).then(|| tally(bpc.into_iter().flatten()));
    PowerRow {
        label: scenario.label.clone(),
        nu: scenario.nu,
        n: scenario.n,
        d: scenario.d,
        rho0: scenario.rho0,
        rho1: scenario.rho1,
        reps,
        spearman: tally(spearman.into_iter()),
        bpc,
    }
}

/// Runs `reps` replications of every scenario on `jobs` worker threads.
///
/// Replication `r` of a scenario always draws from the same seed, so the
/// table does not depend on `jobs`.
pub fn power_table(
    grid: &[Scenario],
    reps: usize,
    config: &TestConfig,
    jobs: usize,
) -> Result<PowerTable> {
    if reps == 0 {
        return Err(Error::InvalidScenario("reps must be at least 1".into()));
    }
    config.validate()?;
    for sc in grid {
        sc.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidScenario(e.to_string()))?;
    let rows = pool.install(|| grid.iter().map(|sc| run_scenario(sc, reps, config)).collect());
    Ok(PowerTable {
        metadata: vec![
            ("kernel".into(), config.kernel.name().into()),
            ("bandwidth".into(), config.bandwidth.to_string()),
            ("alpha".into(), config.alpha.to_string()),
            ("reps".into(), reps.to_string()),
        ],
        rows,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl PowerTable {
    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    /// `# key=value` lines, then a header row and one row per scenario, with
    /// values at full precision.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "label",
            "nu",
            "n",
            "d",
            "rho0",
            "rho1",
            "reps",
            "spearman_rate",
            "spearman_se",
            "spearman_failed",
            "bpc_rate",
            "bpc_se",
            "bpc_failed",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.label.clone(),
                r.nu.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.rho0.to_string(),
                r.rho1.to_string(),
                r.reps.to_string(),
                r.spearman.rate().to_string(),
                r.spearman.std_error().to_string(),
                r.spearman.failed.to_string(),
                fmt_opt(r.bpc.map(|b| b.rate())),
                fmt_opt(r.bpc.map(|b| b.std_error())),
                r.bpc.map_or_else(String::new, |b| b.failed.to_string()),
            ])?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Aligned plain-text rendering, one line per scenario.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(8);
        let _ = writeln!(
            s,
            "{:<width$}  {:>5}  {:>5}  {:>2}  {:>6}  {:>6}  {:>8}  {:>7}  {:>8}  {:>7}",
            "scenario", "nu", "n", "d", "rho0", "rho1", "spearman", "(se)", "bpc", "(se)"
        );
        for r in &self.rows {
            let bpc = r.bpc.map_or_else(|| "-".to_string(), |b| format!("{:.3}", b.rate()));
            let bpc_se = r.bpc.map_or_else(|| "-".to_string(), |b| format!("{:.4}", b.std_error()));
            let _ = writeln!(
                s,
                "{:<width$}  {:>5}  {:>5}  {:>2}  {:>6.2}  {:>6.2}  {:>8.3}  {:>7.4}  {:>8}  {:>7}",
                r.label,
                r.nu,
                r.n,
                r.d,
                r.rho0,
                r.rho1,
                r.spearman.rate(),
                r.spearman.std_error(),
                bpc,
                bpc_se
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::scenario::BreakProfile;

    fn small(seed: u64, rho1: f64) -> Scenario {
        Scenario {
            label: format!("rho1={rho1}"),
            rho1,
            break_profile: BreakProfile::AbruptAtFraction(0.5),
            seed,
            ..Scenario::null(120, 3.0, 0.4)
        }
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(derive_seed(42, 7), a[7]);
        assert_ne!(derive_seed(43, 7), a[7]);
    }

    #[test]
    fn independent_of_thread_count() {
        let grid = [small(1, 0.4), small(2, -0.4)];
        let cfg = TestConfig::default();
        let one = power_table(&grid, 40, &cfg, 1).unwrap();
        let four = power_table(&grid, 40, &cfg, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.to_csv_string(), four.to_csv_string());
    }

    #[test]
    fn trivariate_has_no_bpc_column() {
        let sc = Scenario {
            d: 3,
            theta: vec![0.0; 3],
            ..small(5, 0.0)
        };
        let t = power_table(&[sc], 5, &TestConfig::default(), 2).unwrap();
        assert!(t.rows[0].bpc.is_none());
        assert_eq!(t.rows[0].spearman.completed + t.rows[0].spearman.failed, 5);
    }

    #[test]
    fn zero_reps_rejected() {
        assert!(power_table(&[small(1, 0.4)], 0, &TestConfig::default(), 1).is_err());
    }

    #[test]
    fn std_error_formula() {
        let s = RateSummary {
            rejections: 100,
            completed: 2000,
            failed: 3,
        };
        assert_eq!(s.rate(), 0.05);
        assert!((s.std_error() - (0.05f64 * 0.95 / 2000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let mut t = power_table(&[small(9, 0.4)], 3, &TestConfig::default(), 1).unwrap();
        t.push_metadata("master_seed", 9);
        let text = t.to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines.contains(&"# master_seed=9"));
        assert!(lines.contains(&"# kernel=bartlett"));
        let header = lines.iter().position(|l| l.starts_with("label,")).unwrap();
        assert_eq!(lines.len(), header + 2);
        assert_eq!(lines[header + 1].split(',').count(), 13);
        assert!(t.to_text().contains("rho1=0.4"));
    }
}
