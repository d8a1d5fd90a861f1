use rayon::prelude::*;
use serde::Serialize;

use super::cdf::quasi_stationary_cdf;
use super::solve::SpectralSolution;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// One killed-and-renormalised step applied to a discretisation of the
/// quasi-stationary law.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPointReport {
    pub cells: usize,
    /// Sup distance between the pushed law and the analytic CDF.
    pub ks_distance: f64,
    pub ks_argmax: f64,
    /// Surviving mass after one step; equals `lambda` for the exact law.
    pub survival_mass: f64,
    pub lambda: f64,
}

/// Cuts `nu_a` into `cells` cells of equal mass (the cell holding `1/a` is
/// split there), spreads each cell
/// uniformly over its quantile interval, moves the mass `p` to `ax + 1` and
/// `q` to `ax - 1` (killed below 0), renormalises and compares with `F`.
pub fn quasi_stationarity_check(
    params: &ModelParams,
    solution: &SpectralSolution,
    cells: usize,
) -> Result<FixedPointReport> {
    if solution.closed_form {
        return Err(Error::Unsupported("point mass law".into()));
    }
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("cells = {cells}")));
    }
    let ceiling = params.ceiling();
    let f = |z: f64| quasi_stationary_cdf(params, solution, z.clamp(0.0, ceiling)).map(|v| v.cdf);

    let mut nodes: Vec<f64> = (1..cells)
        .into_par_iter()
        .map(|i| quantile(&f, i as f64 / cells as f64, ceiling))
        .collect::<Result<_>>()?;
    let mut levels: Vec<f64> = (1..cells).map(|i| i as f64 / cells as f64).collect();
    nodes.insert(0, 0.0);
    levels.insert(0, 0.0);
    nodes.push(ceiling);
    levels.push(1.0);
    // the killing threshold is kept as a node so that the killed mass is exact
    let (a, p, q) = (params.a(), params.p(), params.q());
    let threshold = 1.0 / a;
    let at = nodes.partition_point(|&n| n < threshold);
    nodes.insert(at, threshold);
    levels.insert(at, f(threshold)?);
    let fd = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= ceiling {
            return 1.0;
        }
        let i = nodes.partition_point(|&n| n <= x).max(1) - 1;
        let w = nodes[i + 1] - nodes[i];
        let frac = if w > 0.0 { (x - nodes[i]) / w } else { 1.0 };
        levels[i] + frac * (levels[i + 1] - levels[i])
    };

    let killed = fd(threshold);
    let survival_mass = p + q * (1.0 - killed);
    let pushed = |z: f64| {
        (p * fd((z - 1.0) / a) + q * (fd((z + 1.0) / a) - killed).max(0.0)) / survival_mass
    };

    let mut zs: Vec<f64> = nodes
        .iter()
        .flat_map(|&x| [a * x + 1.0, a * x - 1.0])
        .filter(|z| (0.0..=ceiling).contains(z))
        .collect();
    let uniform = 4 * cells;
    zs.extend((0..=uniform).map(|i| ceiling * i as f64 / uniform as f64));
    let (ks_distance, ks_argmax) = zs
        .par_iter()
        .map(|&z| f(z).map(|fz| ((pushed(z) - fz).abs(), z)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, 0.0), |acc, d| if d.0 > acc.0 { d } else { acc });
    Ok(FixedPointReport {
        cells,
        ks_distance,
        ks_argmax,
        survival_mass,
        lambda: solution.lambda,
    })
}

fn quantile(f: &impl Fn(f64) -> Result<f64>, level: f64, ceiling: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, ceiling);
    loop {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Ok(hi);
        }
        if f(mid)? < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_lambda_auto;

    #[test]
    fn uniform_law_is_fixed() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        let (_, s) = solve_lambda_auto(&m, 10_000).unwrap();
        let r = quasi_stationarity_check(&m, &s, 1000).unwrap();
        assert!(r.ks_distance < 1e-6, "{r:?}");
        assert!((r.survival_mass - 0.75).abs() < 1e-6);
    }
}
