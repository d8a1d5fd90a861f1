use serde::Serialize;

use crate::dynamics::{Classification, Orbit};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Partial sums stop once the certified remainder drops below this.
pub const SUM_TOL: f64 = 1e-17;

/// Value of a truncated series with a bound on the omitted remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Number of orbit terms summed explicitly.
    pub truncation: usize,
}

/// Logarithmic weights `(p/lambda)^j (q/p)^L` and the geometric majorant
/// `rho = (p/lambda) max(1, q/p)^C` used for remainders.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Weights {
    pub log_ratio: f64,
    pub log_r: f64,
    pub r_tilde: f64,
    pub freq: f64,
    pub rho: f64,
}

impl Weights {
    pub fn new(params: &ModelParams, lambda: f64, freq: f64) -> Self {
        let log_ratio = (params.p() / lambda).ln();
        let r = params.r();
        let r_tilde = r.max(1.0);
        let rho = (log_ratio + freq * r_tilde.ln()).exp();
        Self {
            log_ratio,
            log_r: if r == 1.0 { 0.0 } else { r.ln() },
            r_tilde,
            freq,
            rho,
        }
    }

    /// `(p/lambda)^j (q/p)^occ`.
    pub fn weight(&self, j: usize, occ: usize) -> f64 {
        (j as f64 * self.log_ratio + occ as f64 * self.log_r).exp()
    }

    /// Bound on `sum_{k >= k_from} (p/lambda)^{k+1} (q/p)^{L_k}`.
    pub fn r_tail(&self, k_from: usize) -> f64 {
        if self.rho >= 1.0 {
            return f64::INFINITY;
        }
        self.r_tilde * self.rho.powi(k_from as i32 + 1) / (1.0 - self.rho)
    }

    /// Bound on `sum_{k >= k_from} (p/lambda)^k (q/p)^{L_k}`.
    pub fn v_tail(&self, k_from: usize) -> f64 {
        if self.rho >= 1.0 {
            return f64::INFINITY;
        }
        self.r_tilde.powf(self.freq + 1.0) * self.rho.powi(k_from as i32) / (1.0 - self.rho)
    }

    /// Bound on `sum_{k >= k_from} k (p/lambda)^{k+1} (q/p)^{L_k}`.
    pub fn weighted_r_tail(&self, k_from: usize) -> f64 {
        if self.rho >= 1.0 {
            return f64::INFINITY;
        }
        let m = k_from as f64 + 1.0;
        let rho = self.rho;
        self.r_tilde * rho.powi(k_from as i32 + 1) * (m - (m - 1.0) * rho)
            / ((1.0 - rho) * (1.0 - rho))
    }
}

/// Cycle multiplier `(p/lambda)^period (q/p)^{ones in cycle}` of a periodic orbit.
pub(crate) fn cycle_factor(orbit: &Orbit, w: &Weights) -> Option<(usize, usize, f64)> {
    match orbit.classification() {
        Classification::EventuallyPeriodic { k0, period } => {
            let ones = orbit.occ()[k0 + period] - orbit.occ()[k0];
            Some((k0, period, w.weight(period, ones)))
        }
        _ => None,
    }
}

/// `R_a(lambda) = sum_k delta_k (p/lambda)^{k+1} (q/p)^{L_k}` with remainder
/// bound `tol` for aperiodic orbits.
pub fn eval_r(
    params: &ModelParams,
    orbit: &Orbit,
    lambda: f64,
    freq: f64,
    tol: f64,
) -> Result<SeriesValue> {
    if !(lambda > 0.0) {
        return Err(Error::NotSummable { lambda });
    }
    let w = Weights::new(params, lambda, freq);
    let deltas = orbit.deltas();
    let occ = orbit.occ();
    let term = |k: usize| {
        if deltas[k] {
            w.weight(k + 1, occ[k])
        } else {
            0.0
        }
    };
    match orbit.classification() {
        Classification::Finite { kappa } => Ok(SeriesValue {
            value: (0..=kappa).map(term).sum(),
            tail_bound: 0.0,
            truncation: kappa + 1,
        }),
        Classification::EventuallyPeriodic { .. } => {
            let (k0, period, pi) = cycle_factor(orbit, &w).unwrap();
            if pi >= 1.0 {
                return Err(Error::NotSummable { lambda });
            }
            let head: f64 = (0..k0).map(term).sum();
            let cycle: f64 = (k0..k0 + period).map(term).sum();
            Ok(SeriesValue {
                value: head + cycle / (1.0 - pi),
                tail_bound: 0.0,
                truncation: k0 + period,
            })
        }
        Classification::AperiodicUpTo { n } => {
            if w.rho >= 1.0 {
                return Err(Error::NotSummable { lambda });
            }
            let mut value = 0.0;
            let mut k = 0;
            while k < n {
                value += term(k);
                k += 1;
                if w.r_tail(k) < tol {
                    break;
                }
            }
            Ok(SeriesValue {
                value,
                tail_bound: w.r_tail(k),
                truncation: k,
            })
        }
    }
}

/// `sum_{k >= 1} k delta_k (p/lambda)^{k+1} (q/p)^{L_k}`, the series inside `1/c`.
pub(crate) fn eval_c_series(
    params: &ModelParams,
    orbit: &Orbit,
    lambda: f64,
    freq: f64,
    tol: f64,
) -> Result<SeriesValue> {
    let w = Weights::new(params, lambda, freq);
    let deltas = orbit.deltas();
    let occ = orbit.occ();
    let term = |k: usize| {
        if deltas[k] {
            w.weight(k + 1, occ[k])
        } else {
            0.0
        }
    };
    match orbit.classification() {
        Classification::Finite { kappa } => Ok(SeriesValue {
            value: (1..=kappa).map(|k| k as f64 * term(k)).sum(),
            tail_bound: 0.0,
            truncation: kappa + 1,
        }),
        Classification::EventuallyPeriodic { .. } => {
            let (k0, period, pi) = cycle_factor(orbit, &w).unwrap();
            if pi >= 1.0 {
                return Err(Error::NotSummable { lambda });
            }
            let head: f64 = (0..k0).map(|k| k as f64 * term(k)).sum();
            let g = 1.0 - pi;
            let cycle: f64 = (k0..k0 + period)
                .map(|k| term(k) * (k as f64 / g + period as f64 * pi / (g * g)))
                .sum();
            Ok(SeriesValue {
                value: head + cycle,
                tail_bound: 0.0,
                truncation: k0 + period,
            })
        }
        Classification::AperiodicUpTo { n } => {
            if w.rho >= 1.0 {
                return Err(Error::NotSummable { lambda });
            }
            let mut value = 0.0;
            let mut k = 0;
            while k < n {
                value += k as f64 * term(k);
                k += 1;
                if w.weighted_r_tail(k) < tol {
                    break;
                }
            }
            Ok(SeriesValue {
                value,
                tail_bound: w.weighted_r_tail(k),
                truncation: k,
            })
        }
    }
}

/// Coefficients `v_k` of `V` on the distinct orbit points, with the cycle
/// part of a periodic orbit resummed, plus the remainder bound.
pub(crate) fn v_coefficients(
    params: &ModelParams,
    orbit: &Orbit,
    lambda: f64,
    freq: f64,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let w = Weights::new(params, lambda, freq);
    let occ = orbit.occ();
    match orbit.classification() {
        Classification::Finite { kappa } => {
            Ok(((0..=kappa).map(|k| w.weight(k, occ[k])).collect(), 0.0))
        }
        Classification::EventuallyPeriodic { .. } => {
            let (k0, period, pi) = cycle_factor(orbit, &w).unwrap();
            let coeffs = (0..k0 + period)
                .map(|k| {
                    let v = w.weight(k, occ[k]);
                    if k < k0 {
                        v
                    } else if pi < 1.0 {
                        v / (1.0 - pi)
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            Ok((coeffs, 0.0))
        }
        Classification::AperiodicUpTo { n } => {
            if w.rho >= 1.0 {
                return Err(Error::NotSummable { lambda });
            }
            let mut coeffs = Vec::new();
            let mut k = 0;
            while k < n {
                coeffs.push(w.weight(k, occ[k]));
                k += 1;
                if w.v_tail(k) < tol {
                    break;
                }
            }
            let tail = w.v_tail(k);
            Ok((coeffs, tail))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit_of_zero;

    #[test]
    fn finite_sum_at_063() {
        let m = ModelParams::rational(63, 100, 0.3).unwrap();
        let o = orbit_of_zero(&m, 100).unwrap();
        let lam = 0.6;
        let want = 0.3 / lam + (0.3f64 / lam).powi(3) * (0.7 / 0.3);
        let got = eval_r(&m, &o, lam, 0.0, SUM_TOL).unwrap();
        assert!((got.value - want).abs() < 1e-15);
        assert_eq!(got.tail_bound, 0.0);
    }

    #[test]
    fn periodic_resummation_matches_brute_force() {
        // a = 1/2: orbit 0, 2, 2, ... so R = p/lambda + 0 and V(2) = 1 + sum (p/lambda)^k
        let m = ModelParams::rational(1, 2, 0.5).unwrap();
        let o = orbit_of_zero(&m, 10).unwrap();
        let r = eval_r(&m, &o, 0.7, 0.0, SUM_TOL).unwrap();
        assert!((r.value - 0.5 / 0.7).abs() < 1e-15);
        let (v, _) = v_coefficients(&m, &o, 0.7, 0.0, SUM_TOL).unwrap();
        let brute: f64 = (1..10_000).map(|k| (0.5f64 / 0.7).powi(k)).sum();
        assert!((v[0] + v[1] - 1.0 - brute).abs() < 1e-12);
    }

    #[test]
    fn strictly_decreasing() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        let o = orbit_of_zero(&m, 400).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=50 {
            let lam = 0.5 + i as f64 * 0.02;
            let v = eval_r(&m, &o, lam, 0.0, SUM_TOL).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
        assert!(eval_r(&m, &o, 1e12, 0.0, SUM_TOL).unwrap().value < 1e-11);
        assert!(eval_r(&m, &o, 0.5, 0.0, SUM_TOL).is_err());
    }
}
