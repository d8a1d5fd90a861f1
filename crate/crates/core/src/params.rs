use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// Contraction coefficient and innovation law of the chain
/// `X_{n+1} = a X_n + xi_{n+1}`, `P(xi = 1) = p`, `P(xi = -1) = q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    a: f64,
    a_exact: Option<(u64, u64)>,
    p: f64,
    q: f64,
    experimental: bool,
}

impl ModelParams {
    /// Floating point `a` in `(0, 2/3]`.
    pub fn new(a: f64, p: f64) -> Result<Self> {
        Self::build(a, None, p, false)
    }

    /// Exact `a = num/den` in `(0, 2/3]`.
    pub fn rational(num: u64, den: u64, p: f64) -> Result<Self> {
        let (n, d) = reduce(num, den)?;
        Self::build(n as f64 / d as f64, Some((n, d)), p, false)
    }

    /// Floating point `a` in `(0, 1)`; values above 2/3 are outside the
    /// range where the theory holds.
    pub fn experimental(a: f64, p: f64) -> Result<Self> {
        Self::build(a, None, p, true)
    }

    /// Exact `a` in `(0, 1)`, see [`ModelParams::experimental`].
    pub fn experimental_rational(num: u64, den: u64, p: f64) -> Result<Self> {
        let (n, d) = reduce(num, den)?;
        Self::build(n as f64 / d as f64, Some((n, d)), p, true)
    }

    fn build(a: f64, a_exact: Option<(u64, u64)>, p: f64, experimental: bool) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p = {p} must lie in (0, 1)"
            )));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "a = {a} must lie in (0, 1)"
            )));
        }
        let above = match a_exact {
            Some((n, d)) => 3 * n as u128 > 2 * d as u128,
            None => a > 2.0 / 3.0,
        };
        if above && !experimental {
            return Err(Error::InvalidParameter(format!(
                "a = {a} exceeds 2/3; enable experimental mode to go further"
            )));
        }
        Ok(Self {
            a,
            a_exact,
            p,
            q: 1.0 - p,
            experimental,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn exact_a(&self) -> Option<(u64, u64)> {
        self.a_exact
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `q / p`.
    pub fn r(&self) -> f64 {
        self.q / self.p
    }

    pub fn is_experimental(&self) -> bool {
        self.experimental
    }

    /// Upper end `1/(1-a)` of the invariant interval.
    pub fn ceiling(&self) -> f64 {
        match self.a_exact {
            Some((n, d)) => d as f64 / (d - n) as f64,
            None => 1.0 / (1.0 - self.a),
        }
    }

    /// Left end `(2a-1)/(1-a)` of the hole; negative when `a < 1/2`.
    pub fn hole_lo(&self) -> f64 {
        match self.a_exact {
            Some((n, d)) => (2.0 * n as f64 - d as f64) / (d - n) as f64,
            None => (2.0 * self.a - 1.0) / (1.0 - self.a),
        }
    }

    /// True when `a <= 1/2`, where `lambda = p` and `V = 1`.
    pub fn is_closed_form(&self) -> bool {
        match self.a_exact {
            Some((n, d)) => 2 * n as u128 <= d as u128,
            None => self.a <= 0.5,
        }
    }

    pub fn is_half(&self) -> bool {
        match self.a_exact {
            Some((n, d)) => 2 * n as u128 == d as u128,
            None => self.a == 0.5,
        }
    }

    pub fn is_two_thirds(&self) -> bool {
        match self.a_exact {
            Some((n, d)) => 3 * n as u128 == 2 * d as u128,
            None => self.a == 2.0 / 3.0,
        }
    }

    /// True when `a > 2/3`.
    pub fn above_two_thirds(&self) -> bool {
        match self.a_exact {
            Some((n, d)) => 3 * n as u128 > 2 * d as u128,
            None => self.a > 2.0 / 3.0,
        }
    }

    /// `a` rendered as `num/den`, or as a decimal when inexact.
    pub fn a_label(&self) -> String {
        match self.a_exact {
            Some((n, d)) => format!("{n}/{d}"),
            None => format!("{}", self.a),
        }
    }
}

fn reduce(num: u64, den: u64) -> Result<(u64, u64)> {
    if den == 0 {
        return Err(Error::InvalidParameter("zero denominator".into()));
    }
    if den > (1 << 62) {
        return Err(Error::InvalidParameter("denominator too large".into()));
    }
    let g = num.gcd(&den).max(1);
    Ok((num / g, den / g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ModelParams::new(0.7, 0.5).is_err());
        assert!(ModelParams::new(0.6, 0.0).is_err());
        assert!(ModelParams::new(0.6, 1.0).is_err());
        assert!(ModelParams::rational(3, 4, 0.5).is_err());
        assert!(ModelParams::experimental_rational(3, 4, 0.5).is_ok());
        assert!(ModelParams::rational(2, 3, 0.5).is_ok());
    }

    #[test]
    fn reduces_and_classifies() {
        let m = ModelParams::rational(4, 6, 0.3).unwrap();
        assert_eq!(m.exact_a(), Some((2, 3)));
        assert!(m.is_two_thirds());
        assert_eq!(m.ceiling(), 3.0);
        assert_eq!(m.hole_lo(), 1.0);
        assert!(ModelParams::rational(1, 2, 0.3).unwrap().is_closed_form());
        assert!((m.q() - 0.7).abs() < 1e-15);
    }
}
