//! Sequential multivariate Spearman's rho from the empirical copula.
//!
//! For prefix length `k` the estimate is
//! `rho_k = h(d) * (2^d / k * sum_{j<=k} prod_i (1 - U_ij) - 1)`,
//! where the pseudo-observations are always ranked against the full sample.

use crate::error::{Error, Result};
use crate::types::PseudoObservations;

/// Normalizing constant `(d + 1) / (2^d - (d + 1))`.
pub fn h_factor(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let d = d as i32;
    Ok(f64::from(d + 1) / (2f64.powi(d) - f64::from(d + 1)))
}

/// Successive estimates and the per-row products they are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoPath {
    /// `values[k - 1]` is the estimate from the first `k` rows.
    pub values: Vec<f64>,
    /// `products[j] = prod_i (1 - U_ij)`, shared with the long-run variance.
    pub products: Vec<f64>,
    pub d: usize,
}

impl RhoPath {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Full-sample estimate.
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// `prod_i (1 - u_i)` for one row of pseudo-observations.
pub fn survival_product(row: &[f64]) -> f64 {
    row.iter().map(|u| 1.0 - u).product()
}

pub fn rho_path(pseudo: &PseudoObservations) -> RhoPath {
    let d = pseudo.d();
    // d >= 2 is enforced by PseudoObservations
    let h = h_factor(d).expect("pseudo-observations have d >= 2");
    let scale = 2f64.powi(d as i32);
    let products: Vec<f64> = pseudo.rows().map(survival_product).collect();
    let mut running = 0.0;
    let values = products
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            running += p;
            h * (scale / (idx + 1) as f64 * running - 1.0)
        })
        .collect();
    RhoPath { values, products, d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn comonotone(n: usize) -> PseudoObservations {
        let rows: Vec<Vec<usize>> = (1..=n).map(|k| vec![k, k]).collect();
        PseudoObservations::from_rank_rows(&rows).unwrap()
    }

    #[test]
    fn h_values() {
        assert_eq!(h_factor(2).unwrap(), 3.0);
        assert_eq!(h_factor(3).unwrap(), 1.0);
        assert_eq!(h_factor(4).unwrap(), 5.0 / 11.0);
        assert_eq!(h_factor(1), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn comonotone_n4() {
        let path = rho_path(&comonotone(4));
        assert!((path.last() - (-0.375)).abs() < 1e-15);
    }

    #[test]
    fn anti_comonotone_n4() {
        let rows = vec![vec![1, 4], vec![2, 3], vec![3, 2], vec![4, 1]];
        let path = rho_path(&PseudoObservations::from_rank_rows(&rows).unwrap());
        assert_eq!(path.products, vec![0.0, 0.125, 0.125, 0.0]);
        assert!((path.last() - (-2.25)).abs() < 1e-15);
    }

    #[test]
    fn comonotone_closed_form_tends_to_one() {
        let n = 20_000;
        let closed = 2.0 * (n as f64 - 1.0) * (2.0 * n as f64 - 1.0) / (n as f64).powi(2) - 3.0;
        let path = rho_path(&comonotone(n));
        assert!((path.last() - closed).abs() < 1e-10);
        assert!((path.last() - 1.0).abs() < 1e-3);
    }

    fn rank_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<usize>> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<usize>> = (0..d)
            .map(|_| {
                let mut c: Vec<usize> = (1..=n).collect();
                c.shuffle(&mut rng);
                c
            })
            .collect();
        (0..n).map(|j| cols.iter().map(|c| c[j]).collect()).collect()
    }

    fn mean_and_se(n: usize, reps: u64) -> (f64, f64) {
        let vals: Vec<f64> = (0..reps)
            .map(|r| {
                let p = PseudoObservations::from_rank_rows(&rank_rows(n, 2, r)).unwrap();
                rho_path(&p).last()
            })
            .collect();
        let reps = reps as f64;
        let mean = vals.iter().sum::<f64>() / reps;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0);
        (mean, (var / reps).sqrt())
    }

    #[test]
    fn independent_uniform_mean_near_zero() {
        let (mean, se) = mean_and_se(20_000, 100);
        assert!(mean.abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn independent_uniform_small_n_bias() {
        // E prod(1 - U_i) = ((n-1)/(2n))^2 for independent rank columns
        let n = 200;
        let expected = 3.0 * (((n - 1) as f64 / n as f64).powi(2) - 1.0);
        let (mean, se) = mean_and_se(n, 400);
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean}, expected {expected}, se {se}");
    }

    proptest! {
        #[test]
        fn streaming_matches_batch(n in 1usize..80, d in 2usize..5, seed in any::<u64>()) {
            let p = PseudoObservations::from_rank_rows(&rank_rows(n, d, seed)).unwrap();
            let path = rho_path(&p);
            let h = h_factor(d).unwrap();
            for k in 1..=n {
                let s: f64 = (0..k).map(|j| p.row(j).iter().map(|u| 1.0 - u).product::<f64>()).sum();
                let batch = h * (2f64.powi(d as i32) / k as f64 * s - 1.0);
                prop_assert!((path.values[k - 1] - batch).abs() < 1e-12);
            }
        }

        #[test]
        fn component_permutation_invariant(n in 1usize..60, seed in any::<u64>()) {
            let rows = rank_rows(n, 3, seed);
            let permuted: Vec<Vec<usize>> = rows.iter().map(|r| vec![r[2], r[0], r[1]]).collect();
            let a = rho_path(&PseudoObservations::from_rank_rows(&rows).unwrap());
            let b = rho_path(&PseudoObservations::from_rank_rows(&permuted).unwrap());
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn products_in_unit_interval(n in 1usize..60, d in 2usize..6, seed in any::<u64>()) {
            let p = PseudoObservations::from_rank_rows(&rank_rows(n, d, seed)).unwrap();
            prop_assert!(rho_path(&p).products.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }
}
