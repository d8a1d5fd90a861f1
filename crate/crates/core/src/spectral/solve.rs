use serde::Serialize;

use super::series::{eval_c_series, eval_r, SUM_TOL};
use crate::dynamics::{orbit_of, orbit_of_zero, return_stats, Classification, Orbit};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Remainder level at which an aperiodic truncation is accepted.
pub const TAIL_TARGET: f64 = 1e-13;

/// Orbit lengths tried first when deepening an aperiodic orbit.
const FIRST_DEPTH: usize = 64;

/// Persistence exponent and the data that certifies it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSolution {
    pub lambda: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub truncation: usize,
    /// Bound on the omitted remainder of `R_a(lambda)`.
    pub tail_bound: f64,
    pub c: f64,
    /// Bound on `|c - c_true|`.
    pub c_error: f64,
    /// Frequency constant `C` in `max(1, (q/p)^C)`.
    pub freq_const: f64,
    /// True when `a <= 1/2` and `lambda = p`.
    pub closed_form: bool,
}

impl SpectralSolution {
    pub(crate) fn closed(params: &ModelParams) -> Self {
        Self {
            lambda: params.p(),
            bracket: (params.p(), params.p()),
            iterations: 0,
            truncation: 0,
            tail_bound: 0.0,
            c: 1.0,
            c_error: 0.0,
            freq_const: 0.0,
            closed_form: true,
        }
    }
}

/// Frequency constant: `C_a` from the return times when `p < 1/2`, else 0.
pub fn frequency_constant(params: &ModelParams, orbit: &Orbit) -> Result<f64> {
    if params.p() < 0.5 {
        Ok(return_stats(orbit, params)?.c_a_f64())
    } else {
        Ok(0.0)
    }
}

/// Sign of `R(lambda) - 1` when it can be certified.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Above,
    Below,
    Unknown,
}

fn side(params: &ModelParams, orbit: &Orbit, lambda: f64, freq: f64) -> Side {
    let judge = |tol: f64| match eval_r(params, orbit, lambda, freq, tol) {
        Err(_) => Side::Above,
        Ok(s) if s.value > 1.0 => Side::Above,
        Ok(s) if s.value + s.tail_bound < 1.0 => Side::Below,
        Ok(_) => Side::Unknown,
    };
    match judge(SUM_TOL) {
        Side::Unknown => judge(0.0),
        s => s,
    }
}

/// Solves `R_a(lambda) = 1` by bisection.
///
/// The starting bracket `[p m, 2 p m]`, `m = max(1, (q/p)^C)`, does not
/// depend on `a`, so orbits with equal digits give bit-identical roots.
pub fn solve_lambda(params: &ModelParams, orbit: &Orbit) -> Result<SpectralSolution> {
    if params.is_closed_form() {
        return Ok(SpectralSolution::closed(params));
    }
    let freq = frequency_constant(params, orbit)?;
    let m = params.r().max(1.0).powf(freq);
    let lo = params.p() * m;
    let mut hi = 2.0 * lo;
    if params.above_two_thirds() {
        let mut grow = 0;
        while side(params, orbit, hi, freq) != Side::Below && grow < 60 {
            hi *= 2.0;
            grow += 1;
        }
    }
    solve_in(params, orbit, freq, lo, hi)
}

/// Bisection on a caller supplied bracket.
pub fn solve_lambda_in(
    params: &ModelParams,
    orbit: &Orbit,
    lo: f64,
    hi: f64,
) -> Result<SpectralSolution> {
    if params.is_closed_form() {
        return Ok(SpectralSolution::closed(params));
    }
    let freq = frequency_constant(params, orbit)?;
    solve_in(params, orbit, freq, lo, hi)
}

fn solve_in(
    params: &ModelParams,
    orbit: &Orbit,
    freq: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<SpectralSolution> {
    let floor = params.p() * params.r().max(1.0).powf(freq);
    if !(lo < hi) || lo < floor {
        return Err(Error::BracketFailure { lo, hi });
    }
    if lo > floor && side(params, orbit, lo, freq) != Side::Above {
        return Err(Error::BracketFailure { lo, hi });
    }
    if side(params, orbit, hi, freq) != Side::Below {
        return Err(Error::BracketFailure { lo, hi });
    }
    let mut iterations = 0;
    let mut lambda = None;
    while iterations < 200 {
        let mid = lo + 0.5 * (hi - lo);
        if !(mid > lo && mid < hi) {
            break;
        }
        iterations += 1;
        match side(params, orbit, mid, freq) {
            Side::Above => lo = mid,
            Side::Below => hi = mid,
            Side::Unknown => {
                lambda = Some(mid);
                break;
            }
        }
    }
    let lambda = lambda.unwrap_or(hi);
    let r = eval_r(params, orbit, lambda, freq, SUM_TOL)?;
    let cs = eval_c_series(params, orbit, lambda, freq, SUM_TOL)?;
    let c = 1.0 / (1.0 + cs.value);
    let c_error = c - 1.0 / (1.0 + cs.value + cs.tail_bound);
    Ok(SpectralSolution {
        lambda,
        bracket: (lo, hi),
        iterations,
        truncation: r.truncation,
        tail_bound: r.tail_bound,
        c,
        c_error,
        freq_const: freq,
        closed_form: false,
    })
}

/// Orbit of zero and solution, lengthening an aperiodic orbit until the
/// remainder of `R_a` is below [`TAIL_TARGET`] or `max_iter` is reached.
/// Decimal `a` falls back to the floating point orbit.
pub fn solve_lambda_auto(
    params: &ModelParams,
    max_iter: usize,
) -> Result<(Orbit, SpectralSolution)> {
    let mut depth = FIRST_DEPTH.min(max_iter).max(1);
    loop {
        let orbit = match params.exact_a() {
            Some(_) => orbit_of_zero(params, depth)?,
            None => orbit_of(params, 0.0, depth)?,
        };
        let last = depth >= max_iter;
        let settled = !matches!(orbit.classification(), Classification::AperiodicUpTo { .. });
        if params.is_closed_form() {
            return Ok((orbit, SpectralSolution::closed(params)));
        }
        match solve_lambda(params, &orbit) {
            Ok(sol) if settled || sol.tail_bound <= TAIL_TARGET || last => return Ok((orbit, sol)),
            Err(e) if last => return Err(e),
            _ => depth = (depth * 2).min(max_iter),
        }
    }
}
