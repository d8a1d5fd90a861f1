use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

fn check(beta_gt_one: bool, alpha_ok: bool, y_ok: bool) -> Result<()> {
    if !beta_gt_one {
        return Err(Error::InvalidParameter("beta must exceed 1".into()));
    }
    if !alpha_ok {
        return Err(Error::InvalidParameter("alpha must lie in [0, 1)".into()));
    }
    if !y_ok {
        return Err(Error::InvalidParameter("y must lie in [0, 1]".into()));
    }
    Ok(())
}

/// The linear mod one map `y -> beta y + alpha (mod 1)`.
pub fn linear_mod_one(beta: f64, alpha: f64, y: f64) -> f64 {
    let z = beta * y + alpha;
    z - z.floor()
}

/// First `n` digits `floor(beta T^k(y) + alpha)` of the `(beta, alpha)`-expansion.
pub fn parry_digits(beta: f64, alpha: f64, y: f64, n: usize) -> Result<Vec<u8>> {
    check(
        beta > 1.0,
        (0.0..1.0).contains(&alpha),
        (0.0..=1.0).contains(&y),
    )?;
    let mut out = Vec::with_capacity(n);
    let mut cur = y;
    for _ in 0..n {
        out.push((beta * cur + alpha).floor() as u8);
        cur = linear_mod_one(beta, alpha, cur);
    }
    Ok(out)
}

/// Same as [`parry_digits`] in exact arithmetic.
pub fn parry_digits_exact(
    beta: &BigRational,
    alpha: &BigRational,
    y: &BigRational,
    n: usize,
) -> Result<Vec<u8>> {
    let one = BigRational::one();
    check(
        *beta > one,
        !alpha.is_negative() && *alpha < one,
        !y.is_negative() && *y <= one,
    )?;
    let mut out = Vec::with_capacity(n);
    let mut cur = y.clone();
    for _ in 0..n {
        let z = beta * &cur + alpha;
        let digit = z.floor();
        out.push(num_traits::ToPrimitive::to_u8(&digit.to_integer()).unwrap_or(u8::MAX));
        cur = z - digit;
        debug_assert!(!cur.is_negative() && cur < one && cur >= BigRational::zero());
    }
    Ok(out)
}

/// Partial sum `sum (d_k - alpha) / beta^(k+1)` of an expansion.
pub fn expansion_value(beta: f64, alpha: f64, digits: &[u8]) -> f64 {
    let mut scale = 1.0 / beta;
    let mut acc = 0.0;
    for &d in digits {
        acc += (d as f64 - alpha) * scale;
        scale /= beta;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn dyadic() {
        assert_eq!(parry_digits(2.0, 0.0, 0.5, 3).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn complemented_two_thirds_digits() {
        let d = parry_digits_exact(&q(3, 2), &q(1, 2), &q(0, 1), 9).unwrap();
        assert_eq!(d, vec![0, 1, 0, 1, 1, 1, 1, 1, 0]);
        assert_eq!(parry_digits(1.5, 0.5, 0.0, 9).unwrap(), d);
    }

    #[test]
    fn three_halves_expansion_of_one() {
        let d = parry_digits_exact(&q(3, 2), &q(0, 1), &q(1, 1), 9).unwrap();
        assert_eq!(d, vec![1, 0, 1, 0, 0, 0, 0, 0, 1]);
        assert!(
            (expansion_value(1.5, 0.0, &parry_digits(1.5, 0.0, 1.0, 80).unwrap()) - 1.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parry_digits(1.0, 0.0, 0.5, 3).is_err());
        assert!(parry_digits(2.0, 1.0, 0.5, 3).is_err());
        assert!(parry_digits(2.0, 0.0, 1.5, 3).is_err());
    }
}
