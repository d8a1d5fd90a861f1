use serde::Serialize;

use crate::error::{Error, Result};

pub const EIGEN_TOL: f64 = 1e-13;
pub const MAX_POWER_ITER: usize = 1_000_000;

/// Perron-Frobenius data of a nonnegative matrix, eigenvectors with unit
/// l1 norm.
#[derive(Debug, Clone, Serialize)]
pub struct PerronFrobenius {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration from the all-ones vector, for the matrix and its transpose.
pub fn leading_eigen(block: &[Vec<f64>]) -> Result<PerronFrobenius> {
    let n = block.len();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if let Some(row) = block.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: row.len(),
        });
    }
    let (lambda, right, it_r) = power(n, |x, y| {
        for (i, row) in block.iter().enumerate() {
            y[i] = row.iter().zip(x).map(|(b, v)| b * v).sum();
        }
    })?;
    let (_, left, it_l) = power(n, |x, y| {
        y.fill(0.0);
        for (row, xi) in block.iter().zip(x) {
            for (yj, b) in y.iter_mut().zip(row) {
                *yj += b * xi;
            }
        }
    })?;
    Ok(PerronFrobenius {
        lambda,
        right,
        left,
        iterations: it_r.max(it_l),
    })
}

fn power(n: usize, apply: impl Fn(&[f64], &mut [f64])) -> Result<(f64, Vec<f64>, usize)> {
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    for it in 1..=MAX_POWER_ITER {
        apply(&x, &mut y);
        let norm: f64 = y.iter().sum();
        if !(norm > 0.0) {
            return Err(Error::NoConvergence { iterations: it });
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let change: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut y);
        if (norm - prev).abs() < EIGEN_TOL && change < EIGEN_TOL {
            return Ok((norm, x, it));
        }
        prev = norm;
    }
    Err(Error::NoConvergence {
        iterations: MAX_POWER_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar() {
        let pf = leading_eigen(&[vec![0.3]]).unwrap();
        assert!((pf.lambda - 0.3).abs() < 1e-15);
    }

    #[test]
    fn kappa_two_block() {
        let p = 0.5;
        let b = vec![vec![0.0, 0.0, p], vec![1.0 - p, p, 0.0], vec![0.0, p, 0.0]];
        let pf = leading_eigen(&b).unwrap();
        let l = pf.lambda;
        assert!((l * l * l - l * l / 2.0 - 0.125).abs() < 1e-12);
        assert!((pf.right.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_block_does_not_converge() {
        let b = vec![vec![0.0, 0.5], vec![0.7, 0.0]];
        assert!(matches!(
            leading_eigen(&b),
            Err(Error::NoConvergence { .. })
        ));
    }
}
