use serde::Serialize;

use super::solve::SpectralSolution;
use crate::dynamics::ReturnStats;
use crate::params::ModelParams;

/// Relative tolerance for the equality case of the upper bound.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Check of `p m < lambda <= (p/a) m` with `m = max(1, (q/p)^C)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundsReport {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `lambda` equals the upper bound within [`EQUALITY_TOL`].
    pub upper_equality: bool,
    /// Equality is expected only at `a = 2/3`, `p = 1/2`.
    pub equality_expected: bool,
    pub pass: bool,
}

pub fn check_bounds(
    params: &ModelParams,
    solution: &SpectralSolution,
    stats: &ReturnStats,
) -> BoundsReport {
    let c = stats.c_a_f64();
    let m = params.r().max(1.0).powf(c);
    let lower = params.p() * m;
    let upper = params.p() / params.a() * m;
    let lambda = solution.lambda;
    let upper_equality = (lambda - upper).abs() <= EQUALITY_TOL * upper;
    let equality_expected = params.is_two_thirds() && params.p() == 0.5;
    let lower_ok = lambda > lower;
    let upper_ok = lambda <= upper || upper_equality;
    BoundsReport {
        lambda,
        lower,
        upper,
        lower_margin: lambda - lower,
        upper_margin: upper - lambda,
        lower_ok,
        upper_ok,
        upper_equality,
        equality_expected,
        pass: lower_ok && upper_ok && upper_equality == equality_expected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::return_stats;
    use crate::spectral::solve_lambda_auto;

    fn report(n: u64, d: u64, p: f64) -> BoundsReport {
        let m = ModelParams::rational(n, d, p).unwrap();
        let (o, s) = solve_lambda_auto(&m, 10_000).unwrap();
        check_bounds(&m, &s, &return_stats(&o, &m).unwrap())
    }

    #[test]
    fn equality_case() {
        let r = report(2, 3, 0.5);
        assert!(r.pass && r.upper_equality, "{r:?}");
    }

    #[test]
    fn strict_cases() {
        let r = report(63, 100, 0.5);
        assert!(r.pass && !r.upper_equality);
        assert!((r.upper - 0.5 / 0.63).abs() < 1e-15);
        let r = report(2, 3, 0.4);
        assert!(r.pass, "{r:?}");
        assert!((r.lower - 0.4 * 1.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!((r.lower - 0.4579).abs() < 1e-4 && (r.upper - 0.6869).abs() < 1e-4);
    }
}
