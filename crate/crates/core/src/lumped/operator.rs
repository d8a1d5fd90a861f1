use serde::Serialize;

use crate::dynamics::{Classification, Orbit};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// The operator `A` on jump sequences of functions stepping at the orbit of
/// zero, with the wrap term of `A-hat` when the orbit is eventually periodic.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorA {
    p: f64,
    q: f64,
    deltas: Vec<bool>,
    occ: Vec<usize>,
    k0: Option<usize>,
}

impl OperatorA {
    /// Aperiodic orbits are cut to their first `truncate` points.
    pub fn from_orbit(params: &ModelParams, orbit: &Orbit, truncate: usize) -> Result<Self> {
        let (dim, k0) = match orbit.classification() {
            Classification::Finite { kappa } => (kappa + 1, None),
            Classification::EventuallyPeriodic { k0, period } => (k0 + period, Some(k0)),
            Classification::AperiodicUpTo { .. } => (truncate.min(orbit.len()), None),
        };
        if dim == 0 {
            return Err(Error::InsufficientOrbit {
                needed: 1,
                available: 0,
            });
        }
        let deltas = orbit.deltas()[..dim].to_vec();
        let occ = orbit.occ()[..=dim].to_vec();
        Ok(Self {
            p: params.p(),
            q: params.q(),
            deltas,
            occ,
            k0,
        })
    }

    pub fn dim(&self) -> usize {
        self.deltas.len()
    }

    pub fn k0(&self) -> Option<usize> {
        self.k0
    }

    /// `c_k = q delta_k + p (1 - delta_k)`.
    pub fn c(&self, k: usize) -> f64 {
        if self.deltas[k] {
            self.q
        } else {
            self.p
        }
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        let mut out = vec![0.0; n];
        out[0] = self.p
            * self
                .deltas
                .iter()
                .zip(u)
                .filter(|(d, _)| **d)
                .map(|(_, x)| x)
                .sum::<f64>();
        for k in 1..n {
            out[k] = self.c(k - 1) * u[k - 1];
        }
        if let Some(k0) = self.k0 {
            out[k0] += self.c(n - 1) * u[n - 1];
        }
        Ok(out)
    }

    /// `v_k = (p/lambda)^k (q/p)^{L_k}`, folded onto the cycle (`M V`) when
    /// the orbit is eventually periodic.
    pub fn right_eigenvector(&self, lambda: f64) -> Vec<f64> {
        let (w, r) = (self.p / lambda, self.q / self.p);
        let n = self.dim();
        let mut v: Vec<f64> = (0..n)
            .map(|k| w.powi(k as i32) * r.powi(self.occ[k] as i32))
            .collect();
        if let Some(k0) = self.k0 {
            let ones = self.occ[n] - self.occ[k0];
            let cycle = w.powi((n - k0) as i32) * r.powi(ones as i32);
            v[k0..].iter_mut().for_each(|x| *x /= 1.0 - cycle);
        }
        v
    }

    /// `v*_k = sum_{n >= k} delta_n (p/lambda)^{n-k+1} (q/p)^{L_n - L_k}`.
    pub fn left_eigenvector(&self, lambda: f64) -> Vec<f64> {
        let (w, r) = (self.p / lambda, self.q / self.p);
        let n = self.dim();
        let step = |k: usize, next: f64| {
            if self.deltas[k] {
                w * (1.0 + r * next)
            } else {
                w * next
            }
        };
        let mut end = 0.0;
        if let Some(k0) = self.k0 {
            // v*_{k0} = alpha + beta v*_{k0}
            let (mut alpha, mut beta) = (0.0, 1.0);
            for k in (k0..n).rev() {
                alpha = step(k, alpha);
                beta *= if self.deltas[k] { w * r } else { w };
            }
            end = alpha / (1.0 - beta);
        }
        let mut out = vec![0.0; n];
        let mut next = end;
        for k in (0..n).rev() {
            next = step(k, next);
            out[k] = next;
        }
        out
    }
}

/// Deviations of `lambda^{-n} A^n u` from its limit, with a fitted rate.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceProbe {
    pub deviations: Vec<f64>,
    /// `exp` of the least-squares slope of `ln delta_n` over the tail of the
    /// run above the roundoff floor; empirical only.
    pub gamma: Option<f64>,
}

pub fn power_convergence_probe(
    op: &OperatorA,
    lambda: f64,
    u: &[f64],
    n_max: usize,
) -> Result<ConvergenceProbe> {
    let v = op.right_eigenvector(lambda);
    let vs = op.left_eigenvector(lambda);
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let scale = dot(u, &vs) / dot(&v, &vs);
    let limit: Vec<f64> = v.iter().map(|x| x * scale).collect();
    let norm_u: f64 = u.iter().map(|x| x.abs()).sum();

    let mut cur = u.to_vec();
    let mut deviations: Vec<f64> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            cur = op.apply(&cur)?;
            cur.iter_mut().for_each(|x| *x /= lambda);
        }
        deviations.push(cur.iter().zip(&limit).map(|(a, b)| (a - b).abs()).sum());
    }

    let floor = 1e-12 * norm_u.max(f64::MIN_POSITIVE);
    let usable = deviations
        .iter()
        .position(|&d| d <= floor)
        .unwrap_or(deviations.len());
    let from = usable / 2;
    let pts: Vec<(f64, f64)> = (from..usable)
        .map(|n| (n as f64, deviations[n].ln()))
        .collect();
    let gamma = (pts.len() >= 3).then(|| {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        (sxy / sxx).exp()
    });
    Ok(ConvergenceProbe { deviations, gamma })
}
