use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Which piece of `T_a` acts on a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `x -> (x + 1)/a`
    Lower,
    /// `x -> (x - 1)/a`
    Upper,
    Hole,
}

/// Result of one application of `T_a`.
#[derive(Debug, Clone, PartialEq)]
pub enum MapOutcome<S> {
    Image(S),
    Hole,
}

/// Chooses the branch from the position of `x` relative to `1` and to the
/// left end of the hole.
pub(crate) fn select_branch(
    params: &ModelParams,
    vs_one: Ordering,
    vs_hole_lo: Ordering,
) -> Branch {
    if params.above_two_thirds() {
        // hole is [1, (2a-1)/(1-a)]
        if vs_one == Ordering::Less {
            Branch::Lower
        } else if vs_hole_lo == Ordering::Greater {
            Branch::Upper
        } else {
            Branch::Hole
        }
    } else if vs_one != Ordering::Less {
        Branch::Upper
    } else if vs_hole_lo != Ordering::Greater {
        Branch::Lower
    } else {
        Branch::Hole
    }
}

fn domain_slack(params: &ModelParams) -> f64 {
    4.0 * f64::EPSILON * params.ceiling()
}

pub fn branch_of(params: &ModelParams, x: f64) -> Result<Branch> {
    let ceiling = params.ceiling();
    if !(x >= 0.0 && x <= ceiling + domain_slack(params)) {
        return Err(Error::OutOfDomain { x, ceiling });
    }
    let vs_one = x.partial_cmp(&1.0).unwrap();
    let vs_lo = x.partial_cmp(&params.hole_lo()).unwrap();
    Ok(select_branch(params, vs_one, vs_lo))
}

/// One step of `T_a` in floating point.
pub fn apply_t(params: &ModelParams, x: f64) -> Result<MapOutcome<f64>> {
    let a = params.a();
    Ok(match branch_of(params, x)? {
        Branch::Lower => MapOutcome::Image((x + 1.0) / a),
        Branch::Upper => MapOutcome::Image((x - 1.0) / a),
        Branch::Hole => MapOutcome::Hole,
    })
}

pub(crate) fn exact_a(params: &ModelParams) -> Result<BigRational> {
    let (n, d) = params
        .exact_a()
        .ok_or_else(|| Error::InvalidParameter("exact arithmetic needs a rational a".into()))?;
    Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub(crate) fn exact_hole_lo(params: &ModelParams) -> Result<BigRational> {
    let a = exact_a(params)?;
    let one = BigRational::one();
    Ok((&a + &a - &one) / (&one - &a))
}

pub fn branch_of_exact(params: &ModelParams, x: &BigRational) -> Result<Branch> {
    let a = exact_a(params)?;
    let one = BigRational::one();
    let ceiling = &one / (&one - &a);
    if x.is_negative() || *x > ceiling {
        return Err(Error::OutOfDomain {
            x: rational_to_f64(x),
            ceiling: params.ceiling(),
        });
    }
    let lo = exact_hole_lo(params)?;
    Ok(select_branch(params, x.cmp(&one), x.cmp(&lo)))
}

/// One step of `T_a` in exact rational arithmetic.
pub fn apply_t_exact(params: &ModelParams, x: &BigRational) -> Result<MapOutcome<BigRational>> {
    let a = exact_a(params)?;
    let one = BigRational::one();
    Ok(match branch_of_exact(params, x)? {
        Branch::Lower => MapOutcome::Image((x + &one) / &a),
        Branch::Upper => MapOutcome::Image((x - &one) / &a),
        Branch::Hole => MapOutcome::Hole,
    })
}

/// Quotient of two big integers as `f64`, without overflow for huge operands.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits().max(den.bits());
    let shift = bits.saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    ratio_to_f64(x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn branches_at_two_thirds() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        assert_eq!(
            apply_t_exact(&m, &q(1, 1)).unwrap(),
            MapOutcome::Image(q(0, 1))
        );
        assert_eq!(
            apply_t_exact(&m, &q(0, 1)).unwrap(),
            MapOutcome::Image(q(3, 2))
        );
        assert_eq!(
            apply_t_exact(&m, &q(3, 1)).unwrap(),
            MapOutcome::Image(q(3, 1))
        );
        assert_eq!(apply_t(&m, 1.0).unwrap(), MapOutcome::Image(0.0));
        assert!(matches!(apply_t(&m, 3.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(apply_t(&m, -0.1), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn hole_membership() {
        let m = ModelParams::rational(3, 5, 0.5).unwrap();
        // hole is (1/2, 1)
        assert_eq!(
            apply_t_exact(&m, &q(1, 2)).unwrap(),
            MapOutcome::Image(q(5, 2))
        );
        assert_eq!(apply_t_exact(&m, &q(3, 4)).unwrap(), MapOutcome::Hole);
        assert_eq!(apply_t(&m, 0.75).unwrap(), MapOutcome::Hole);
        let low = ModelParams::rational(2, 5, 0.5).unwrap();
        assert_eq!(apply_t(&low, 0.0).unwrap(), MapOutcome::Hole);
        assert_eq!(apply_t(&low, 1.5).unwrap(), MapOutcome::Image(1.25));
    }

    #[test]
    fn experimental_hole_is_closed() {
        let m = ModelParams::experimental_rational(3, 4, 0.5).unwrap();
        // hole is [1, 2]
        assert_eq!(apply_t_exact(&m, &q(1, 1)).unwrap(), MapOutcome::Hole);
        assert_eq!(apply_t_exact(&m, &q(2, 1)).unwrap(), MapOutcome::Hole);
        assert_eq!(
            apply_t_exact(&m, &q(5, 2)).unwrap(),
            MapOutcome::Image(q(2, 1))
        );
        assert_eq!(
            apply_t_exact(&m, &q(1, 2)).unwrap(),
            MapOutcome::Image(q(2, 1))
        );
    }

    #[test]
    fn huge_ratio() {
        let n = BigInt::from(3) << 5000usize;
        let d = BigInt::from(2) << 5000usize;
        assert_eq!(ratio_to_f64(&n, &d), 1.5);
    }
}
