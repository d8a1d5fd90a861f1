use num_rational::Ratio;
use num_traits::Zero;

use super::orbit::{Classification, Extent, Orbit};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Returns of the orbit of zero to `[0, 1)` and the frequency constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnStats {
    /// `t_0 = 0` followed by the return times.
    pub t: Vec<usize>,
    pub sigma: Extent,
    /// `d_0, d_1, ...` for every `n` the known return times determine.
    pub d: Vec<Ratio<u64>>,
    pub c_a: Ratio<u64>,
}

impl ReturnStats {
    pub fn t1(&self) -> Option<usize> {
        self.t.get(1).copied()
    }

    pub fn c_a_f64(&self) -> f64 {
        *self.c_a.numer() as f64 / *self.c_a.denom() as f64
    }
}

/// Upper limit on returns generated by unrolling a periodic orbit.
const UNROLL_LIMIT: usize = 1 << 20;

/// Return statistics of an orbit of zero.
pub fn return_stats(orbit: &Orbit, params: &ModelParams) -> Result<ReturnStats> {
    let small_p = params.p() < 0.5;
    let mut t = vec![0usize];
    let (scanned, cycle_returns) = match orbit.classification() {
        Classification::EventuallyPeriodic { k0, period } => {
            (k0 + period, (k0..k0 + period).any(|k| orbit.deltas()[k]))
        }
        _ => (orbit.len(), false),
    };
    t.extend((1..scanned).filter(|&k| orbit.deltas()[k]));
    let sigma = match orbit.classification() {
        Classification::Finite { .. } => Extent::Finite(t.len() - 1),
        Classification::EventuallyPeriodic { .. } if cycle_returns => Extent::Infinite,
        Classification::EventuallyPeriodic { .. } => Extent::Finite(t.len() - 1),
        Classification::AperiodicUpTo { .. } => Extent::AtLeast(t.len() - 1),
    };

    // how many returns the minimum over n needs
    let n_max = if small_p && t.len() > 1 {
        let bound = params.r().powf(1.0 / t[1] as f64).floor();
        let bound = if bound.is_finite() && bound < UNROLL_LIMIT as f64 {
            bound as usize
        } else {
            UNROLL_LIMIT
        };
        Some(match sigma {
            Extent::Finite(s) => bound.min(s),
            _ => bound,
        })
    } else {
        None
    };

    if let (Some(n_max), Extent::Infinite) = (n_max, sigma) {
        let mut k = scanned;
        while t.len() < n_max + 2 {
            if orbit.delta_at(k) == Some(true) {
                t.push(k);
            }
            k += 1;
        }
    }
    if let (Some(n_max), Extent::AtLeast(known)) = (n_max, sigma) {
        if n_max + 1 > known {
            return Err(Error::InsufficientOrbit {
                needed: n_max + 1,
                available: known,
            });
        }
    }

    let returns = t.len() - 1;
    let last_n = match sigma {
        Extent::Finite(s) => s,
        _ => returns.saturating_sub(1),
    };
    let mut d = Vec::new();
    if returns > 0 {
        d.push(Ratio::from_integer(t[1] as u64));
        let mut prefix: Option<Ratio<u64>> = None;
        for n in 1..=last_n {
            let cand = Ratio::new(t[n] as u64 + 1, n as u64);
            prefix = Some(prefix.map_or(cand, |m| m.min(cand)));
            let mut dn = prefix.unwrap();
            let below_sigma = match sigma {
                Extent::Finite(s) => n < s,
                _ => true,
            };
            if below_sigma {
                dn = dn.min(Ratio::new(t[n + 1] as u64, n as u64 + 1));
            }
            d.push(dn);
        }
    }

    let c_a = match n_max {
        Some(n_max) if !d.is_empty() => {
            let biggest = d[..=n_max.min(d.len() - 1)].iter().max().copied().unwrap();
            biggest.recip()
        }
        _ => Ratio::zero(),
    };
    Ok(ReturnStats { t, sigma, d, c_a })
}
