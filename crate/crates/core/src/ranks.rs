//! Columnwise pseudo-observations `U_ij = rank(X_ij) / n`.
//!
//! The divisor is the full sample size `n` for every row, so the largest
//! observation of each column maps to exactly `1.0`. Ties receive the
//! average of the ranks they span.

use crate::types::{PseudoObservations, Sample};

/// Average ranks (1-based) of `column`, plus the number of tied pairs.
pub fn average_ranks(column: &[f64]) -> (Vec<f64>, usize) {
    let n = column.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));

    let mut ranks = vec![0.0; n];
    let mut tied_pairs = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && column[order[end]] == column[order[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        let g = end - start;
        tied_pairs += g * (g - 1) / 2;
        start = end;
    }
    (ranks, tied_pairs)
}

pub fn pseudo_observations(sample: &Sample) -> PseudoObservations {
    let (n, d) = (sample.n(), sample.d());
    let mut u = vec![0.0; n * d];
    let mut ties = vec![0; d];
    let scale = n as f64;
    for (i, tie) in ties.iter_mut().enumerate() {
        let (ranks, t) = average_ranks(&sample.column(i));
        *tie = t;
        for (j, r) in ranks.into_iter().enumerate() {
            u[j * d + i] = r / scale;
        }
    }
    PseudoObservations::from_parts(n, d, u, ties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_col(first: &[f64]) -> Sample {
        let rows: Vec<Vec<f64>> = first
            .iter()
            .enumerate()
            .map(|(j, &x)| vec![x, j as f64])
            .collect();
        Sample::from_rows(&rows).unwrap()
    }

    #[test]
    fn strict_ordering() {
        let p = pseudo_observations(&two_col(&[3.1, -2.0, 7.4]));
        assert_eq!(p.column(0), vec![2.0 / 3.0, 1.0 / 3.0, 1.0]);
        assert_eq!(p.tie_counts(), &[0, 0]);
    }

    #[test]
    fn ties_get_average_rank() {
        let p = pseudo_observations(&two_col(&[5.0, 5.0, 1.0]));
        assert_eq!(p.column(0), vec![2.5 / 3.0, 2.5 / 3.0, 1.0 / 3.0]);
        assert_eq!(p.tie_counts(), &[1, 0]);
    }

    #[test]
    fn triple_tie_counts_three_pairs() {
        let (r, t) = average_ranks(&[2.0, 2.0, 2.0, 0.0]);
        assert_eq!(r, vec![3.0, 3.0, 3.0, 1.0]);
        assert_eq!(t, 3);
    }

    proptest! {
        #[test]
        fn tie_free_columns_are_permutations(xs in prop::collection::hash_set(-1_000_000i64..1_000_000, 2..60)) {
            let xs: Vec<f64> = xs.into_iter().map(|v| v as f64 / 7.0).collect();
            let n = xs.len();
            let p = pseudo_observations(&two_col(&xs));
            let mut col = p.column(0);
            col.sort_by(f64::total_cmp);
            let expected: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
            prop_assert_eq!(col, expected);
        }

        #[test]
        fn monotone_transform_leaves_ranks_unchanged(xs in prop::collection::vec(-50.0f64..50.0, 2..60)) {
            let s = two_col(&xs);
            let t = s.map_column(0, |x| (x / 10.0).exp() * 3.0 + x.powi(3)).unwrap();
            prop_assert_eq!(pseudo_observations(&s), pseudo_observations(&t));
        }

        #[test]
        fn other_columns_do_not_matter(xs in prop::collection::vec(-5.0f64..5.0, 3..40)) {
            let rows: Vec<Vec<f64>> = xs.iter().enumerate().map(|(j, &x)| vec![x, -(j as f64), x * x]).collect();
            let s = Sample::from_rows(&rows).unwrap();
            let swapped = s.select_columns(&[2, 1, 0]).unwrap();
            let (a, b) = (pseudo_observations(&s), pseudo_observations(&swapped));
            prop_assert_eq!(a.column(0), b.column(2));
            prop_assert_eq!(a.column(2), b.column(0));
        }
    }
}
