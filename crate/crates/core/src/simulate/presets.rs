//! Named scenario grids for the standard power study.

use crate::error::{Error, Result};
use crate::simulate::power::derive_seed;
use crate::simulate::scenario::{BreakProfile, Outlier, QFormula, Scenario};

pub const PRESETS: [&str; 4] = ["table1", "table2", "table3", "outlier-sweep"];

const RHO0: f64 = 0.4;
const SIZES: [usize; 3] = [500, 1000, 2000];
const DOFS: [f64; 3] = [1.0, 3.0, 5.0];
/// First entry is the null.
const BIVARIATE_RHO1: [f64; 8] = [0.4, 0.6, 0.8, 0.2, 0.0, -0.2, -0.4, -0.6];
const TRIVARIATE_RHO1: [f64; 7] = [0.4, 0.6, 0.8, 0.2, 0.0, -0.2, -0.4];

fn jump(nu: f64, n: usize, d: usize, theta: &[f64], rho1: f64) -> Scenario {
    Scenario {
        label: format!("nu={nu} n={n} rho1={rho1}"),
        n,
        d,
        nu,
        theta: theta.to_vec(),
        rho0: RHO0,
        rho1,
        break_profile: BreakProfile::AbruptAtFraction(0.5),
        contamination: Vec::new(),
        strong_outliers: 0,
        q_formula: QFormula::Exact,
        seed: 0,
    }
}

fn bivariate_grid(theta: &[f64]) -> Vec<Scenario> {
    let mut grid = Vec::new();
    for &nu in &DOFS {
        for &n in &SIZES {
            for &rho1 in &BIVARIATE_RHO1 {
                grid.push(jump(nu, n, 2, theta, rho1));
            }
        }
    }
    grid
}

/// Position `c * 500` of the single outlier for `c = 0.05, 0.10, ..., 1`.
pub(crate) fn sweep_positions() -> Vec<(f64, usize)> {
    (1..=20).map(|i| (i as f64 * 0.05, i * 25)).collect()
}

fn outlier_sweep() -> Vec<Scenario> {
    sweep_positions()
        .into_iter()
        .map(|(c, position)| Scenario {
            label: format!("c={c:.2}"),
            theta: vec![0.3, 0.2],
            contamination: vec![Outlier {
                position,
                values: vec![40.0, -100.0],
            }],
            ..Scenario::null(500, 5.0, RHO0)
        })
        .collect()
}

/// Scenario grid for a named preset; scenario `i` gets seed
/// `derive_seed(master_seed, i)`.
pub fn preset(name: &str, master_seed: u64, q_formula: QFormula) -> Result<Vec<Scenario>> {
    let mut grid = match name {
        "table1" => bivariate_grid(&[0.0, 0.0]),
        "table2" => bivariate_grid(&[0.3, 0.2]),
        "table3" => SIZES
            .iter()
            .flat_map(|&n| TRIVARIATE_RHO1.iter().map(move |&rho1| jump(3.0, n, 3, &[0.0; 3], rho1)))
            .collect(),
        "outlier-sweep" => outlier_sweep(),
        other => {
            return Err(Error::InvalidScenario(format!(
                "unknown preset '{other}', expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    for (i, sc) in grid.iter_mut().enumerate() {
        sc.seed = derive_seed(master_seed, i as u64);
        sc.q_formula = q_formula;
    }
    Ok(grid)
}
