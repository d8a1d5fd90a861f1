use serde::Serialize;

use super::cdf::quasi_stationary_cdf;
use super::series::{v_coefficients, SeriesValue, SUM_TOL};
use super::solve::SpectralSolution;
use crate::dynamics::Orbit;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// The eigenfunction `V(x) = sum_k (p/lambda)^k (q/p)^{L_k} 1{T^k(0) <= x}`
/// as a step function over the orbit of zero.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    // sorted jump locations and cumulative heights
    jumps: Vec<f64>,
    cumulative: Vec<f64>,
    tail: f64,
    lambda: f64,
    half: bool,
}

impl Eigenfunction {
    pub fn new(params: &ModelParams, solution: &SpectralSolution, orbit: &Orbit) -> Result<Self> {
        if solution.closed_form {
            return Ok(Self {
                jumps: vec![0.0],
                cumulative: vec![1.0],
                tail: 0.0,
                lambda: solution.lambda,
                half: params.is_half(),
            });
        }
        let (coeffs, tail) =
            v_coefficients(params, orbit, solution.lambda, solution.freq_const, SUM_TOL)?;
        let mut pairs: Vec<(f64, f64)> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &v)| (orbit.points()[k], v))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut acc = 0.0;
        let mut jumps = Vec::with_capacity(pairs.len());
        let mut cumulative = Vec::with_capacity(pairs.len());
        for (x, v) in pairs {
            acc += v;
            jumps.push(x);
            cumulative.push(acc);
        }
        Ok(Self {
            jumps,
            cumulative,
            tail,
            lambda: solution.lambda,
            half: false,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Bound on the part of `V` beyond the truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    /// Jump locations and jump sizes.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.jumps.iter().enumerate().map(|(i, &x)| {
            let prev = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
            (x, self.cumulative[i] - prev)
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.half && x >= 2.0 {
            return f64::INFINITY;
        }
        let i = self.jumps.partition_point(|&j| j <= x);
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// `sum_k v_k (ceiling - T^k(0))`, the integral of `V` over the domain.
    pub fn integral(&self, ceiling: f64) -> SeriesValue {
        let value = self.jumps().map(|(x, v)| v * (ceiling - x).max(0.0)).sum();
        SeriesValue {
            value,
            tail_bound: self.tail * ceiling,
            truncation: self.jumps.len(),
        }
    }
}

/// `V(x)` with its remainder bound.
pub fn eval_v(
    params: &ModelParams,
    solution: &SpectralSolution,
    orbit: &Orbit,
    x: f64,
) -> Result<SeriesValue> {
    let ceiling = params.ceiling();
    if !(x >= 0.0 && x <= ceiling * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::OutOfDomain { x, ceiling });
    }
    let v = Eigenfunction::new(params, solution, orbit)?;
    Ok(SeriesValue {
        value: v.eval(x),
        tail_bound: v.tail_bound(),
        truncation: v.jumps.len(),
    })
}

/// `max |p f(ax+1) + q f(ax-1) 1{x >= 1/a} - lambda f(x)|` over a grid.
pub fn killed_operator_residual(
    params: &ModelParams,
    lambda: f64,
    f: impl Fn(f64) -> f64,
    grid: &[f64],
) -> f64 {
    let (a, p, q) = (params.a(), params.p(), params.q());
    grid.iter()
        .map(|&x| {
            let down = if a * x - 1.0 >= 0.0 {
                q * f(a * x - 1.0)
            } else {
                0.0
            };
            (p * f(a * x + 1.0) + down - lambda * f(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Residual of the eigenvalue relation `P V = lambda V`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Contribution the truncation of `V` may add to the residual.
    pub tail_allowance: f64,
}

pub fn eigen_residual(
    params: &ModelParams,
    solution: &SpectralSolution,
    orbit: &Orbit,
    grid: &[f64],
) -> Result<ResidualReport> {
    let v = Eigenfunction::new(params, solution, orbit)?;
    let max_residual = killed_operator_residual(params, solution.lambda, |x| v.eval(x), grid);
    let tail_allowance = v.tail_bound() * (1.0 + solution.lambda);
    Ok(ResidualReport {
        max_residual,
        tail_allowance,
    })
}

/// `integral of c V` over `[0, 1/(1-a)]` with its error bound.
pub fn integral_cv(
    params: &ModelParams,
    solution: &SpectralSolution,
    orbit: &Orbit,
) -> Result<SeriesValue> {
    let v = Eigenfunction::new(params, solution, orbit)?;
    let s = v.integral(params.ceiling());
    Ok(SeriesValue {
        value: solution.c * s.value,
        tail_bound: solution.c * s.tail_bound + solution.c_error * (s.value + s.tail_bound),
        truncation: s.truncation,
    })
}

/// `integral of c V d nu_a`, which equals 1 for the exact quantities.
pub fn integral_cv_nu(
    params: &ModelParams,
    solution: &SpectralSolution,
    orbit: &Orbit,
) -> Result<SeriesValue> {
    let v = Eigenfunction::new(params, solution, orbit)?;
    let mut value = 0.0;
    let mut err = v.tail_bound();
    for (x, w) in v.jumps() {
        let f = quasi_stationary_cdf(params, solution, x)?;
        value += w * f.survival;
        err += w * f.tail_bound;
    }
    Ok(SeriesValue {
        value: solution.c * value,
        tail_bound: solution.c * err + solution.c_error * (value + err),
        truncation: v.jumps.len(),
    })
}
