//! Multivariate Student-t innovations `Z / sqrt(W / nu)` with
//! `Z ~ N(0, S)` and `W ~ chi^2(nu)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Integer degrees of freedom up to this bound use a sum of squared normals.
const MAX_EXACT_DOF: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InnovationSpec {
    /// Degrees of freedom; `f64::INFINITY` gives Gaussian innovations.
    pub nu: f64,
    d: usize,
    /// Lower Cholesky factor of the shape matrix, row-major.
    chol: Vec<f64>,
    chi: ChiSource,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChiSource {
    Gaussian,
    SumOfSquares(usize),
    Gamma(ChiSquared<f64>),
}

impl InnovationSpec {
    /// `shape` is a symmetric positive-definite `d x d` matrix with unit
    /// diagonal, row-major.
    pub fn new(nu: f64, d: usize, shape: &[f64]) -> Result<Self> {
        if nu.is_nan() || nu <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "degrees of freedom must be positive, got {nu}"
            )));
        }
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if shape.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: shape.len(),
            });
        }
        let m = DMatrix::from_row_slice(d, d, shape);
        for i in 0..d {
            if m[(i, i)] != 1.0 {
                return Err(Error::InvalidScenario(format!(
                    "shape matrix diagonal entry {} is {}, expected 1",
                    i + 1,
                    m[(i, i)]
                )));
            }
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        let l = m.cholesky().ok_or(Error::NotPositiveDefinite)?.l();
        let chol = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|ij| l[ij]).collect();
        let chi = if nu.is_infinite() {
            ChiSource::Gaussian
        } else if nu.fract() == 0.0 && nu <= MAX_EXACT_DOF {
            ChiSource::SumOfSquares(nu as usize)
        } else {
            ChiSource::Gamma(ChiSquared::new(nu).map_err(|e| Error::InvalidScenario(e.to_string()))?)
        };
        Ok(Self { nu, d, chol, chi })
    }

    /// Shape matrix with every off-diagonal entry equal to `q`.
    pub fn equicorrelated(nu: f64, d: usize, q: f64) -> Result<Self> {
        if q.is_nan() || q.abs() >= 1.0 {
            return Err(Error::ShapeOutOfRange(q));
        }
        let shape: Vec<f64> = (0..d * d)
            .map(|idx| if idx / d == idx % d { 1.0 } else { q })
            .collect();
        Self::new(nu, d, &shape)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Writes one draw into `out` (length `d`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.d;
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..=i).map(|j| self.chol[i * d + j] * z[j]).sum();
        }
        let scale = match self.chi {
            ChiSource::Gaussian => return,
            ChiSource::SumOfSquares(k) => {
                let w: f64 = (0..k)
                    .map(|_| {
                        let g: f64 = rng.sample(StandardNormal);
                        g * g
                    })
                    .sum();
                (w / self.nu).sqrt()
            }
            ChiSource::Gamma(chi) => (chi.sample(rng) / self.nu).sqrt(),
        };
        for o in out.iter_mut() {
            *o /= scale;
        }
    }
}

pub fn sample_mvt<R: Rng + ?Sized>(spec: &InnovationSpec, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; spec.d()];
    spec.sample_into(rng, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
        let syy: f64 = ys.iter().map(|b| (b - my).powi(2)).sum();
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn near_gaussian_limit_recovers_q() {
        let spec = InnovationSpec::equicorrelated(1e6, 2, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sample_mvt(&spec, &mut rng)).collect();
        let xs: Vec<f64> = draws.iter().map(|v| v[0]).collect();
        let ys: Vec<f64> = draws.iter().map(|v| v[1]).collect();
        assert!((pearson(&xs, &ys) - 0.4).abs() < 0.02);
    }

    #[test]
    fn cauchy_margins_have_zero_median() {
        let spec = InnovationSpec::equicorrelated(1.0, 2, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sample_mvt(&spec, &mut rng)).collect();
        for i in 0..2 {
            let mut col: Vec<f64> = draws.iter().map(|v| v[i]).collect();
            col.sort_by(f64::total_cmp);
            let median = 0.5 * (col[49_999] + col[50_000]);
            assert!(median.abs() < 0.05, "median {median}");
        }
    }

    #[test]
    fn t5_variance_matches_nu_over_nu_minus_two() {
        let spec = InnovationSpec::equicorrelated(5.0, 2, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200_000;
        let v: f64 = (0..n).map(|_| sample_mvt(&spec, &mut rng)[0].powi(2)).sum::<f64>() / n as f64;
        assert!((v - 5.0 / 3.0).abs() < 0.05, "variance {v}");
    }

    #[test]
    fn non_positive_definite_shape() {
        assert_eq!(
            InnovationSpec::new(3.0, 2, &[1.0, 1.2, 1.2, 1.0]),
            Err(Error::NotPositiveDefinite)
        );
        // equicorrelated with q <= -1/(d-1) is singular or indefinite
        assert_eq!(
            InnovationSpec::equicorrelated(3.0, 3, -0.6),
            Err(Error::NotPositiveDefinite)
        );
        assert_eq!(InnovationSpec::equicorrelated(3.0, 2, 1.2), Err(Error::ShapeOutOfRange(1.2)));
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = InnovationSpec::equicorrelated(2.5, 3, 0.3).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(sample_mvt(&spec, &mut a), sample_mvt(&spec, &mut b));
        }
    }
}
