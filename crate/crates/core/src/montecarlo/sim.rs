use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub const DEFAULT_CHUNK: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCConfig {
    pub seed: u64,
    /// Attempted paths.
    pub reps: u64,
    pub horizon: usize,
    pub start: f64,
    /// Paths per random stream.
    pub chunk: u64,
}

impl MCConfig {
    pub fn new(seed: u64, reps: u64, horizon: usize) -> Self {
        Self {
            seed,
            reps,
            horizon,
            start: 0.0,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn with_start(mut self, x0: f64) -> Self {
        self.start = x0;
        self
    }

    pub fn with_chunk(mut self, chunk: u64) -> Self {
        self.chunk = chunk;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.chunk == 0 {
            return Err(Error::InvalidParameter(
                "reps and chunk must be positive".into(),
            ));
        }
        if !self.start.is_finite() {
            return Err(Error::InvalidParameter(format!("start = {}", self.start)));
        }
        Ok(())
    }

    pub(crate) fn chunks(&self) -> u64 {
        self.reps.div_ceil(self.chunk)
    }

    pub(crate) fn chunk_len(&self, i: u64) -> u64 {
        self.chunk.min(self.reps - i * self.chunk)
    }
}

/// Stream `chunk` of the generator seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Draws `xi = +1` with probability `p`. At `p = 1/2` each random word
/// supplies 64 innovations.
#[derive(Debug, Clone)]
pub struct InnovationSampler {
    threshold: Option<u64>,
    word: u64,
    left: u32,
}

impl InnovationSampler {
    pub fn new(p: f64) -> Self {
        let threshold = (p != 0.5).then(|| (p * 2f64.powi(64)).min(u64::MAX as f64) as u64);
        Self {
            threshold,
            word: 0,
            left: 0,
        }
    }

    /// The next innovation as `+1.0` or `-1.0`.
    #[inline(always)]
    pub fn xi(&mut self, rng: &mut impl RngCore) -> f64 {
        let up = match self.threshold {
            Some(t) => (rng.next_u64() < t) as u64,
            None => {
                if self.left == 0 {
                    self.word = rng.next_u64();
                    self.left = 64;
                }
                let bit = self.word & 1;
                self.word >>= 1;
                self.left -= 1;
                bit
            }
        };
        (2 * up) as f64 - 1.0
    }

    #[inline]
    pub fn up(&mut self, rng: &mut impl RngCore) -> bool {
        match self.threshold {
            Some(t) => rng.next_u64() < t,
            None => {
                if self.left == 0 {
                    self.word = rng.next_u64();
                    self.left = 64;
                }
                let bit = self.word & 1 == 1;
                self.word >>= 1;
                self.left -= 1;
                bit
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedPath {
    pub path: Vec<f64>,
    pub innovations: Vec<i8>,
    /// First index with `X < 0`; `None` if the path survived.
    pub tau: Option<usize>,
}

/// Runs `n` steps from `x0`; the path continues after the killing time.
pub fn simulate_path(
    params: &ModelParams,
    x0: f64,
    n: usize,
    rng: &mut impl RngCore,
) -> SimulatedPath {
    let mut sampler = InnovationSampler::new(params.p());
    let innovations: Vec<i8> = (0..n)
        .map(|_| if sampler.up(rng) { 1 } else { -1 })
        .collect();
    simulate_forced(params, x0, &innovations)
}

/// The path driven by the given innovations.
pub fn simulate_forced(params: &ModelParams, x0: f64, innovations: &[i8]) -> SimulatedPath {
    let a = params.a();
    let mut path = Vec::with_capacity(innovations.len() + 1);
    path.push(x0);
    let mut tau = (x0 < 0.0).then_some(0);
    let mut x = x0;
    for (k, &xi) in innovations.iter().enumerate() {
        x = a * x + xi as f64;
        path.push(x);
        if tau.is_none() && x < 0.0 {
            tau = Some(k + 1);
        }
    }
    SimulatedPath {
        path,
        innovations: innovations.to_vec(),
        tau,
    }
}

/// One path stopped at the killing time; returns the final value when the
/// path survives `n` steps and reports each survived step.
#[inline]
pub(crate) fn run_killed(
    a: f64,
    x0: f64,
    n: usize,
    sampler: &mut InnovationSampler,
    rng: &mut impl RngCore,
    mut on_step: impl FnMut(usize, f64),
) -> Option<f64> {
    if x0 < 0.0 {
        return None;
    }
    let mut x = x0;
    for k in 1..=n {
        x = a * x + sampler.xi(rng);
        if x < 0.0 {
            return None;
        }
        on_step(k, x);
    }
    Some(x)
}

/// Steps resolved by one table lookup in the fair-coin case.
const PREFIX_STEPS: usize = 12;

/// Killed-chain sampler for many paths from one start. With `p = 1/2` the
/// first steps of a path are read from a table indexed by the next random
/// bits, and only the bits a path actually uses are consumed.
pub(crate) struct KilledRunner {
    a: f64,
    x0: f64,
    n: usize,
    sampler: InnovationSampler,
    prefix: Option<(usize, Vec<u8>, Vec<f64>)>,
    word: u64,
    left: usize,
}

impl KilledRunner {
    pub(crate) fn new(params: &ModelParams, x0: f64, n: usize) -> Self {
        let a = params.a();
        let m = PREFIX_STEPS.min(n);
        let prefix = (params.p() == 0.5 && m > 0).then(|| {
            let mut death = vec![0u8; 1 << m];
            let mut end = vec![0.0; 1 << m];
            for bits in 0..1usize << m {
                let mut x = x0;
                for k in 0..m {
                    x = a * x + if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
                    if x < 0.0 {
                        death[bits] = (k + 1) as u8;
                        break;
                    }
                }
                end[bits] = x;
            }
            (m, death, end)
        });
        Self {
            a,
            x0,
            n,
            sampler: InnovationSampler::new(params.p()),
            prefix,
            word: 0,
            left: 0,
        }
    }

    /// `Ok(X_n)` for a surviving path, otherwise `Err(tau)`.
    #[inline]
    pub(crate) fn run(&mut self, rng: &mut impl RngCore) -> std::result::Result<f64, usize> {
        if self.x0 < 0.0 {
            return Err(0);
        }
        let Some((m, death, end)) = &self.prefix else {
            let mut x = self.x0;
            for k in 1..=self.n {
                x = self.a * x + self.sampler.xi(rng);
                if x < 0.0 {
                    return Err(k);
                }
            }
            return Ok(x);
        };
        let m = *m;
        if self.left < m {
            self.word = rng.next_u64();
            self.left = 64;
        }
        let idx = (self.word & ((1u64 << m) - 1)) as usize;
        let d = death[idx] as usize;
        if d > 0 {
            self.word >>= d;
            self.left -= d;
            return Err(d);
        }
        self.word >>= m;
        self.left -= m;
        let mut x = end[idx];
        for k in m + 1..=self.n {
            if self.left == 0 {
                self.word = rng.next_u64();
                self.left = 64;
            }
            let bit = self.word & 1;
            self.word >>= 1;
            self.left -= 1;
            x = self.a * x + ((2 * bit) as f64 - 1.0);
            if x < 0.0 {
                return Err(k);
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_paths() {
        let m = ModelParams::new(0.6, 0.5).unwrap();
        let s = simulate_forced(&m, 0.0, &[1, 1]);
        assert_eq!(s.path, vec![0.0, 1.0, 1.6]);
        assert_eq!(s.tau, None);
        assert_eq!(simulate_forced(&m, 0.0, &[-1, 1, 1]).tau, Some(1));
        assert_eq!(simulate_forced(&m, -0.0, &[]).tau, None);
    }

    #[test]
    fn small_a_survivors_only_go_up() {
        let m = ModelParams::new(0.4, 0.5).unwrap();
        let mut rng = chunk_rng(3, 0);
        for _ in 0..2000 {
            let s = simulate_path(&m, 0.0, 8, &mut rng);
            if s.tau.is_none() {
                assert!(s.innovations.iter().all(|&x| x == 1));
            }
        }
    }

    #[test]
    fn prefix_table_matches_stepping() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        for n in [0, 3, 12, 30] {
            let mut fast = KilledRunner::new(&m, 0.0, n);
            let mut slow = KilledRunner::new(&m, 0.0, n);
            slow.prefix = None;
            let (mut r1, mut r2) = (chunk_rng(9, 1), chunk_rng(9, 1));
            let mut hist = [vec![0u64; n + 2], vec![0u64; n + 2]];
            for _ in 0..400_000 {
                hist[0][fast.run(&mut r1).map_or_else(|d| d, |_| n + 1)] += 1;
                hist[1][slow.run(&mut r2).map_or_else(|d| d, |_| n + 1)] += 1;
            }
            for (h0, h1) in hist[0].iter().zip(&hist[1]) {
                let tol = 5.0 * ((*h0 + *h1) as f64).sqrt() + 5.0;
                assert!((*h0 as f64 - *h1 as f64).abs() < tol, "{n}: {hist:?}");
            }
        }
    }

    #[test]
    fn sampler_frequency() {
        for p in [0.5, 0.3] {
            let mut s = InnovationSampler::new(p);
            let mut rng = chunk_rng(1, 2);
            let ups = (0..200_000).filter(|_| s.up(&mut rng)).count() as f64 / 200_000.0;
            assert!((ups - p).abs() < 0.005);
        }
    }
}
