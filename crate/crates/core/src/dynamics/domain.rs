use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::map::{exact_a, exact_hole_lo, rational_to_f64};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// One maximal interval of `{x : kappa(x) >= k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainInterval {
    pub lo: f64,
    pub hi: f64,
    pub closed_lo: bool,
    pub closed_hi: bool,
}

impl DomainInterval {
    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.closed_lo && x == self.lo))
            && (x < self.hi || (self.closed_hi && x == self.hi))
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The set `{x : kappa(x) >= k}` as ordered disjoint intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalDecomposition {
    pub k: usize,
    pub intervals: Vec<DomainInterval>,
    /// Left endpoints.
    pub left_endpoints: Vec<f64>,
    /// Right endpoints.
    pub right_endpoints: Vec<f64>,
}

impl IntervalDecomposition {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(DomainInterval::length).sum()
    }
}

#[derive(Clone)]
struct Piece {
    lo: BigRational,
    hi: BigRational,
    closed_lo: bool,
    closed_hi: bool,
    // image of [lo, hi] under the current iterate
    u: BigRational,
    v: BigRational,
    // slope of the inverse of the current iterate
    scale: BigRational,
}

impl Piece {
    fn preimage(&self, y: &BigRational) -> BigRational {
        &self.lo + (y - &self.u) * &self.scale
    }
}

/// Maximal intervals on which the first `k` iterates avoid the hole.
///
/// Pieces are split where their image crosses the hole; at `a = 2/3` the
/// pieces are half-open at the preimages of 1.
pub fn domain_decomposition(params: &ModelParams, k: usize) -> Result<IntervalDecomposition> {
    if params.is_closed_form() || params.above_two_thirds() {
        return Err(Error::InvalidParameter(
            "domain decomposition needs 1/2 < a <= 2/3".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let a = exact_a(params)?;
    let lo_hole = exact_hole_lo(params)?;
    let one = BigRational::one();
    let ceiling = &one / (&one - &a);
    let two_thirds = params.is_two_thirds();

    let mut pieces = vec![Piece {
        lo: BigRational::from_integer(0.into()),
        hi: ceiling.clone(),
        closed_lo: true,
        closed_hi: true,
        u: BigRational::from_integer(0.into()),
        v: ceiling,
        scale: one.clone(),
    }];
    for depth in 0..k {
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for pc in &pieces {
            let last = depth + 1 == k;
            // part mapped by the lower branch
            let lower_hi = if two_thirds {
                one.clone()
            } else {
                lo_hole.clone()
            };
            if pc.u < lower_hi || (!two_thirds && pc.u == lower_hi) {
                let (v, closed_hi) = if pc.v < lower_hi || (!two_thirds && pc.v == lower_hi) {
                    (pc.v.clone(), pc.closed_hi)
                } else {
                    (lower_hi.clone(), !two_thirds)
                };
                next.push(advance(
                    pc,
                    pc.u.clone(),
                    v,
                    pc.closed_lo,
                    closed_hi,
                    &a,
                    1,
                    last,
                ));
            }
            // part mapped by the upper branch
            if pc.v >= one {
                let (u, closed_lo) = if pc.u >= one {
                    (pc.u.clone(), pc.closed_lo)
                } else {
                    (one.clone(), true)
                };
                next.push(advance(
                    pc,
                    u,
                    pc.v.clone(),
                    closed_lo,
                    pc.closed_hi,
                    &a,
                    -1,
                    last,
                ));
            }
        }
        next.retain(|pc| pc.lo < pc.hi || (pc.closed_lo && pc.closed_hi));
        pieces = next;
    }
    pieces.sort_by(|x, y| x.lo.cmp(&y.lo));
    let intervals: Vec<DomainInterval> = pieces
        .iter()
        .map(|pc| DomainInterval {
            lo: rational_to_f64(&pc.lo),
            hi: rational_to_f64(&pc.hi),
            closed_lo: pc.closed_lo,
            closed_hi: pc.closed_hi,
        })
        .collect();
    Ok(IntervalDecomposition {
        k,
        left_endpoints: intervals.iter().map(|iv| iv.lo).collect(),
        right_endpoints: intervals.iter().map(|iv| iv.hi).collect(),
        intervals,
    })
}

#[allow(clippy::too_many_arguments)]
fn advance(
    pc: &Piece,
    u: BigRational,
    v: BigRational,
    closed_lo: bool,
    closed_hi: bool,
    a: &BigRational,
    sign: i32,
    last: bool,
) -> Piece {
    let lo = pc.preimage(&u);
    let hi = pc.preimage(&v);
    let shift = BigRational::from_integer(sign.into());
    let (nu, nv, scale) = if last {
        (u, v, pc.scale.clone())
    } else {
        ((&u + &shift) / a, (&v + &shift) / a, &pc.scale * a)
    };
    Piece {
        lo,
        hi,
        closed_lo,
        closed_hi,
        u: nu,
        v: nv,
        scale,
    }
}
