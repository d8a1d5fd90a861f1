use rayon::prelude::*;
use serde::Serialize;

use super::sim::{chunk_rng, run_killed, InnovationSampler, KilledRunner, MCConfig};
use crate::dynamics::{recovered_innovations, reversed_recover};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{quasi_stationary_cdf, solve_lambda_auto};

/// Quantile of the standard normal used for the 95% intervals.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub reps_used: u64,
    pub ci95: (f64, f64),
}

impl MCEstimate {
    fn new(value: f64, stderr: f64, reps_used: u64) -> Self {
        Self {
            value,
            stderr,
            reps_used,
            ci95: (value - Z95 * stderr, value + Z95 * stderr),
        }
    }

    fn proportion(hits: u64, reps: u64) -> Self {
        let v = hits as f64 / reps as f64;
        Self::new(v, (v * (1.0 - v) / reps as f64).sqrt(), reps)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci95.0 <= x && x <= self.ci95.1
    }
}

/// Survivor counts at every step `0..=horizon`, summed over chunks.
fn survival_counts(params: &ModelParams, cfg: &MCConfig) -> Result<Vec<u64>> {
    cfg.validate()?;
    let n = cfg.horizon;
    let per_chunk: Vec<Vec<u64>> = (0..cfg.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let mut runner = KilledRunner::new(params, cfg.start, n);
            let mut deaths = vec![0u64; n + 1];
            for _ in 0..cfg.chunk_len(c) {
                if let Err(d) = runner.run(&mut rng) {
                    deaths[d] += 1;
                }
            }
            deaths
        })
        .collect();
    let mut deaths = vec![0u64; n + 1];
    for part in per_chunk {
        deaths.iter_mut().zip(part).for_each(|(t, c)| *t += c);
    }
    let mut alive = cfg.reps;
    Ok(deaths
        .iter()
        .map(|d| {
            alive -= d;
            alive
        })
        .collect())
}

/// Fraction of paths with `tau > horizon`.
pub fn estimate_persistence(params: &ModelParams, cfg: &MCConfig) -> Result<MCEstimate> {
    let counts = survival_counts(params, cfg)?;
    let hits = counts[cfg.horizon];
    if hits == 0 {
        return Err(Error::DegenerateEstimate(format!(
            "no survivors after {} steps in {} paths",
            cfg.horizon, cfg.reps
        )));
    }
    Ok(MCEstimate::proportion(hits, cfg.reps))
}

/// `P(tau > n)` for every `n` in `0..=cfg.horizon` from one batch of paths.
pub fn estimate_survival_curve(params: &ModelParams, cfg: &MCConfig) -> Result<Vec<MCEstimate>> {
    let counts = survival_counts(params, cfg)?;
    Ok(counts
        .into_iter()
        .map(|hits| MCEstimate::proportion(hits, cfg.reps))
        .collect())
}

/// `(P(tau > n_hi) / P(tau > n_lo))^{1/(n_hi - n_lo)}` with a delta-method
/// standard error; `cfg.horizon` is replaced by `n_hi`.
pub fn estimate_lambda_ratio(
    params: &ModelParams,
    cfg: &MCConfig,
    n_lo: usize,
    n_hi: usize,
) -> Result<MCEstimate> {
    if n_hi < n_lo + 5 {
        return Err(Error::InvalidParameter(format!(
            "need n_hi - n_lo >= 5, got {n_lo}..{n_hi}"
        )));
    }
    let cfg = MCConfig {
        horizon: n_hi,
        ..*cfg
    };
    let counts = survival_counts(params, &cfg)?;
    let (lo, hi) = (counts[n_lo], counts[n_hi]);
    if hi == 0 {
        return Err(Error::DegenerateEstimate(format!(
            "no survivors after {n_hi} steps in {} paths",
            cfg.reps
        )));
    }
    let d = (n_hi - n_lo) as f64;
    let pi = hi as f64 / lo as f64;
    let se_pi = (pi * (1.0 - pi) / lo as f64).sqrt();
    let value = pi.powf(1.0 / d);
    Ok(MCEstimate::new(value, value * se_pi / (d * pi), cfg.reps))
}

/// Dvoretzky-Kiefer-Wolfowitz half-width for `m` samples at level `alpha`.
pub fn dkw_epsilon(m: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * m as f64)).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalCdf {
    pub attempts: u64,
    pub survivors: usize,
    pub grid: Vec<f64>,
    pub ecdf: Vec<f64>,
    pub analytic: Vec<f64>,
    /// Sup distance between the empirical and the analytic CDF over all `z`.
    pub ks: f64,
    /// 95% DKW half-width.
    pub dkw_eps: f64,
    pub within_band: bool,
    /// Smallest and largest surviving value.
    pub range: (f64, f64),
}

/// Empirical law of `X_n` given `tau > n`, by rejection, against the
/// quasi-stationary CDF.
pub fn estimate_conditional_cdf(
    params: &ModelParams,
    cfg: &MCConfig,
    z_grid: &[f64],
) -> Result<ConditionalCdf> {
    cfg.validate()?;
    let n = cfg.horizon;
    let mut values: Vec<f64> = (0..cfg.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let mut runner = KilledRunner::new(params, cfg.start, n);
            (0..cfg.chunk_len(c))
                .filter_map(|_| runner.run(&mut rng).ok())
                .collect::<Vec<f64>>()
        })
        .flatten()
        .collect();
    if values.is_empty() {
        return Err(Error::DegenerateEstimate(format!(
            "no survivors after {n} steps in {} paths",
            cfg.reps
        )));
    }
    values.sort_by(f64::total_cmp);
    let m = values.len();

    let (_, solution) = solve_lambda_auto(params, crate::dynamics::DEFAULT_MAX_ITER)?;
    let ceiling = params.ceiling();
    let f = |z: f64| quasi_stationary_cdf(params, &solution, z.clamp(0.0, ceiling)).map(|v| v.cdf);
    let mut ks: f64 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let fx = f(x)?;
        ks = ks
            .max((i + 1) as f64 / m as f64 - fx)
            .max(fx - i as f64 / m as f64);
    }
    let ecdf = z_grid
        .iter()
        .map(|&z| values.partition_point(|&x| x <= z) as f64 / m as f64)
        .collect();
    let analytic = z_grid.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
    let dkw_eps = dkw_epsilon(m, 0.05);
    Ok(ConditionalCdf {
        attempts: cfg.reps,
        survivors: m,
        grid: z_grid.to_vec(),
        ecdf,
        analytic,
        ks,
        dkw_eps,
        within_band: ks <= dkw_eps,
        range: (values[0], values[m - 1]),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReversedTimeReport {
    pub attempts: u64,
    pub survivors: usize,
    pub max_error: f64,
    /// Surviving paths whose innovations were not recovered exactly.
    pub innovation_mismatches: usize,
    /// Surviving paths the backward iteration could not follow.
    pub failures: usize,
}

/// Rebuilds every surviving path from its endpoint alone.
pub fn check_reversed_time(params: &ModelParams, cfg: &MCConfig) -> Result<ReversedTimeReport> {
    cfg.validate()?;
    if params.is_two_thirds() || params.above_two_thirds() {
        return Err(Error::Unsupported(
            "reversed-time reconstruction needs a < 2/3".into(),
        ));
    }
    let a = params.a();
    let n = cfg.horizon;
    let parts: Vec<(usize, f64, usize, usize)> = (0..cfg.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let mut sampler = InnovationSampler::new(params.p());
            let mut path = vec![cfg.start; n + 1];
            let (mut survivors, mut worst, mut mismatches, mut failures) = (0, 0.0f64, 0, 0);
            for _ in 0..cfg.chunk_len(c) {
                let Some(x_n) =
                    run_killed(a, cfg.start, n, &mut sampler, &mut rng, |k, x| path[k] = x)
                else {
                    continue;
                };
                survivors += 1;
                match reversed_recover(params, x_n, n) {
                    Ok(back) => {
                        let err = back
                            .iter()
                            .zip(&path)
                            .map(|(u, v)| (u - v).abs())
                            .fold(0.0, f64::max);
                        worst = worst.max(err);
                        if recovered_innovations(&back) != innovations_of(a, &path) {
                            mismatches += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            (survivors, worst, mismatches, failures)
        })
        .collect();
    let mut report = ReversedTimeReport {
        attempts: cfg.reps,
        survivors: 0,
        max_error: 0.0,
        innovation_mismatches: 0,
        failures: 0,
    };
    for (s, w, m, f) in parts {
        report.survivors += s;
        report.max_error = report.max_error.max(w);
        report.innovation_mismatches += m;
        report.failures += f;
    }
    Ok(report)
}

/// The simulated innovations, `xi_k = X_k - a X_{k-1}` rounded to a sign.
fn innovations_of(a: f64, path: &[f64]) -> Vec<i8> {
    path.windows(2)
        .map(|w| if w[1] - a * w[0] > 0.0 { 1 } else { -1 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_law_for_small_a() {
        let m = ModelParams::new(0.45, 0.6).unwrap();
        let est = estimate_persistence(&m, &MCConfig::new(11, 2_000_000, 10)).unwrap();
        assert!(est.contains(0.6f64.powi(10)), "{est:?}");
    }

    #[test]
    fn zero_horizon() {
        let m = ModelParams::new(0.63, 0.5).unwrap();
        let est = estimate_persistence(&m, &MCConfig::new(1, 100, 0)).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn reproducible_across_chunkings() {
        let m = ModelParams::new(0.63, 0.5).unwrap();
        let cfg = MCConfig::new(5, 300_000, 12).with_chunk(10_000);
        let a = estimate_persistence(&m, &cfg).unwrap();
        let b = estimate_persistence(&m, &cfg).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| estimate_persistence(&m, &cfg).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn degenerate_when_nobody_survives() {
        let m = ModelParams::new(0.63, 0.5).unwrap();
        let r = estimate_persistence(&m, &MCConfig::new(1, 10, 200));
        assert!(matches!(r, Err(Error::DegenerateEstimate(_))));
    }

    #[test]
    fn reversed_time_small_run() {
        let m = ModelParams::rational(3, 5, 0.5).unwrap();
        let r = check_reversed_time(&m, &MCConfig::new(2, 200_000, 10)).unwrap();
        assert!(r.survivors > 100);
        assert!(
            r.max_error < 1e-9 && r.innovation_mismatches == 0 && r.failures == 0,
            "{r:?}"
        );
        let two_thirds = ModelParams::rational(2, 3, 0.5).unwrap();
        assert!(check_reversed_time(&two_thirds, &MCConfig::new(2, 10, 5)).is_err());
    }

    #[test]
    fn small_a_concentrates_at_ceiling() {
        let m = ModelParams::new(0.45, 0.5).unwrap();
        let r = estimate_conditional_cdf(&m, &MCConfig::new(4, 1 << 22, 20), &[1.0]).unwrap();
        let ceiling = m.ceiling();
        assert!(r.range.0 >= ceiling * (1.0 - 0.45f64.powi(20)) - 1e-12);
        assert!(r.range.1 <= ceiling);
    }
}
