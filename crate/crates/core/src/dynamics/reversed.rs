use super::map::{branch_of, Branch};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Rounding slack at the edges of the hole; backward steps amplify errors
/// by `1/a`, so a float path can land just inside.
pub const EDGE_TOL: f64 = 1e-9;

/// Surviving history `[X_0, ..., X_n]` that ends at `x_n`, recovered by
/// iterating `T_a` backwards in time.
pub fn reversed_recover(params: &ModelParams, x_n: f64, n: usize) -> Result<Vec<f64>> {
    if params.is_two_thirds() || params.above_two_thirds() {
        return Err(Error::Unsupported(
            "reversed-time reconstruction needs a < 2/3".into(),
        ));
    }
    let a = params.a();
    let mut path = Vec::with_capacity(n + 1);
    let mut cur = x_n;
    path.push(cur);
    for k in 0..n {
        cur = match branch_of(params, cur)? {
            Branch::Lower => (cur + 1.0) / a,
            Branch::Upper => (cur - 1.0) / a,
            Branch::Hole if 1.0 - cur <= EDGE_TOL => {
                *path.last_mut().unwrap() = 1.0;
                0.0
            }
            Branch::Hole if cur - params.hole_lo() <= EDGE_TOL => {
                let edge = params.hole_lo();
                *path.last_mut().unwrap() = edge;
                (edge + 1.0) / a
            }
            Branch::Hole => return Err(Error::Hole { step: k }),
        };
        path.push(cur);
    }
    path.reverse();
    Ok(path)
}

/// Innovations `xi_1..xi_n` read off a surviving path: `xi_j = -1` exactly
/// when `X_j < 1`.
pub fn recovered_innovations(path: &[f64]) -> Vec<i8> {
    path.iter()
        .skip(1)
        .map(|&x| if x < 1.0 { -1 } else { 1 })
        .collect()
}

/// History of the unkilled chain for `a < 1/2`, where the two-sided map is
/// defined on `[-1/(1-a), 1/(1-a)]` minus a central gap.
pub fn reversed_recover_unconditional(
    params: &ModelParams,
    x_n: f64,
    n: usize,
) -> Result<Vec<f64>> {
    if params.is_closed_form() && !params.is_half() {
        let a = params.a();
        let ceiling = params.ceiling();
        let gap = (1.0 - 2.0 * a) / (1.0 - a);
        if x_n.abs() > ceiling * (1.0 + 4.0 * f64::EPSILON) || x_n.is_nan() {
            return Err(Error::OutOfDomain { x: x_n, ceiling });
        }
        let mut path = Vec::with_capacity(n + 1);
        let mut cur = x_n;
        path.push(cur);
        for k in 0..n {
            if cur.abs() < gap {
                return Err(Error::Gap { step: k });
            }
            cur = if cur < 0.0 {
                (cur + 1.0) / a
            } else {
                (cur - 1.0) / a
            };
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    } else {
        Err(Error::Unsupported(
            "the two-sided reversed map needs a < 1/2".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_path_at_three_fifths() {
        let m = ModelParams::rational(3, 5, 0.5).unwrap();
        // forward: 2.4 -> 0.44 -> 1.264 with innovations (-1, +1)
        let path = reversed_recover(&m, 1.264, 2).unwrap();
        let want = [2.4, 0.44, 1.264];
        for (x, w) in path.iter().zip(want) {
            assert!((x - w).abs() < 1e-12, "{path:?}");
        }
        assert_eq!(recovered_innovations(&path), vec![-1, 1]);
        assert_eq!(reversed_recover(&m, 0.52, 2), Err(Error::Hole { step: 0 }));
    }

    #[test]
    fn one_step_from_zero() {
        let m = ModelParams::rational(11, 20, 0.5).unwrap();
        assert_eq!(reversed_recover(&m, 1.0, 1).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn hole_after_two_pullbacks() {
        let m = ModelParams::rational(63, 100, 0.5).unwrap();
        let y = 0.85;
        let x = 0.63 * (0.63 * y + 1.0) + 1.0;
        assert_eq!(reversed_recover(&m, x, 3), Err(Error::Hole { step: 2 }));
    }

    #[test]
    fn refuses_two_thirds() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        assert!(matches!(
            reversed_recover(&m, 1.0, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn two_sided_map() {
        let m = ModelParams::rational(2, 5, 0.5).unwrap();
        assert_eq!(
            reversed_recover_unconditional(&m, 1.0, 1).unwrap(),
            vec![0.0, 1.0]
        );
        assert_eq!(
            reversed_recover_unconditional(&m, -1.0, 1).unwrap(),
            vec![0.0, -1.0]
        );
        let path = reversed_recover_unconditional(&m, 1.4 * 0.4 - 1.0, 2).unwrap();
        assert!((path[0] - 1.0).abs() < 1e-12 && (path[1] - 1.4).abs() < 1e-12);
        assert_eq!(
            reversed_recover_unconditional(&m, 0.1, 1),
            Err(Error::Gap { step: 0 })
        );
        let half = ModelParams::rational(1, 2, 0.5).unwrap();
        assert!(reversed_recover_unconditional(&half, 1.0, 1).is_err());
    }
}
