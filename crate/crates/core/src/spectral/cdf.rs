use serde::Serialize;

use super::series::{Weights, SUM_TOL};
use super::solve::SpectralSolution;
use crate::dynamics::{branch_of, Branch, EPS_HOLE};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Cap on the number of orbit terms used for one CDF value.
const MAX_TERMS: usize = 1_000_000;

/// Value of the quasi-stationary distribution function at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfValue {
    pub z: f64,
    /// `nu_a((z, 1/(1-a)])`.
    pub survival: f64,
    pub cdf: f64,
    pub truncation: usize,
    pub tail_bound: f64,
    /// Set when the orbit of `z` passes within [`EPS_HOLE`] of the left end
    /// of the hole; the tail bound is widened accordingly.
    pub boundary_warning: bool,
}

/// `1 - sum_j delta_j(z) (p/lambda)^{j+1} (q/p)^{L_j(z)}` along the
/// floating point orbit of `z`.
pub fn quasi_stationary_cdf(
    params: &ModelParams,
    solution: &SpectralSolution,
    z: f64,
) -> Result<CdfValue> {
    let ceiling = params.ceiling();
    if !(z >= 0.0 && z <= ceiling * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::OutOfDomain { x: z, ceiling });
    }
    if solution.closed_form {
        // point mass at the ceiling
        let at_top = z >= ceiling;
        return Ok(CdfValue {
            z,
            survival: if at_top { 0.0 } else { 1.0 },
            cdf: if at_top { 1.0 } else { 0.0 },
            truncation: 0,
            tail_bound: 0.0,
            boundary_warning: false,
        });
    }
    let w = Weights::new(params, solution.lambda, solution.freq_const);
    let a = params.a();
    let lo = params.hole_lo();
    let mut cur = z.min(ceiling);
    let mut occ = 0usize;
    let mut sum = 0.0;
    let mut widen = 0.0;
    let mut warning = false;
    let mut j = 0usize;
    let tail = loop {
        if (cur - 1.0).abs() < EPS_HOLE {
            // the orbit reaches 1: closed form with the remaining terms folded in
            sum += w.weight(j + 1, occ);
            j += 1;
            break 0.0;
        }
        let delta = cur < 1.0;
        if delta {
            sum += w.weight(j + 1, occ);
        }
        let branch = branch_of(params, cur)?;
        if branch == Branch::Hole {
            j += 1;
            break 0.0;
        }
        if lo > 0.0 && (cur - lo).abs() < EPS_HOLE && !warning {
            warning = true;
            widen = w.r_tail(j + 1);
        }
        occ += delta as usize;
        j += 1;
        let rest = w.r_tail(j);
        if rest < SUM_TOL || j >= MAX_TERMS {
            break rest;
        }
        cur = match branch {
            Branch::Lower => (cur + 1.0) / a,
            _ => (cur - 1.0) / a,
        }
        .clamp(0.0, ceiling);
    };
    let survival = sum.clamp(0.0, 1.0);
    Ok(CdfValue {
        z,
        survival,
        cdf: 1.0 - survival,
        truncation: j,
        tail_bound: tail + widen,
        boundary_warning: warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_lambda_auto;

    #[test]
    fn uniform_at_two_thirds() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        let (_, s) = solve_lambda_auto(&m, 10_000).unwrap();
        for i in 0..=300 {
            let z = 3.0 * i as f64 / 300.0;
            let c = quasi_stationary_cdf(&m, &s, z).unwrap();
            assert!((c.cdf - z / 3.0).abs() < 1e-8 + c.tail_bound, "z={z} {c:?}");
        }
    }

    #[test]
    fn endpoints() {
        for (n, d, p) in [(63, 100, 0.5), (2, 3, 0.3), (4, 7, 0.6)] {
            let m = ModelParams::rational(n, d, p).unwrap();
            let (_, s) = solve_lambda_auto(&m, 10_000).unwrap();
            let c0 = quasi_stationary_cdf(&m, &s, 0.0).unwrap();
            assert!(c0.cdf.abs() < 1e-12, "{c0:?}");
            let top = quasi_stationary_cdf(&m, &s, m.ceiling()).unwrap();
            assert!((top.cdf - 1.0).abs() < 1e-12, "{top:?}");
        }
    }

    #[test]
    fn monotone_on_grid() {
        let m = ModelParams::rational(63, 100, 0.3).unwrap();
        let (_, s) = solve_lambda_auto(&m, 10_000).unwrap();
        let mut prev = -1.0;
        for i in 0..=1000 {
            let c = quasi_stationary_cdf(&m, &s, m.ceiling() * i as f64 / 1000.0).unwrap();
            assert!(c.cdf >= prev - 2.0 * c.tail_bound - 1e-15);
            prev = c.cdf;
        }
    }

    #[test]
    fn point_mass_for_small_a() {
        let m = ModelParams::rational(9, 20, 0.5).unwrap();
        let (_, s) = solve_lambda_auto(&m, 100).unwrap();
        assert_eq!(quasi_stationary_cdf(&m, &s, 1.8).unwrap().cdf, 0.0);
        assert_eq!(quasi_stationary_cdf(&m, &s, m.ceiling()).unwrap().cdf, 1.0);
    }
}
