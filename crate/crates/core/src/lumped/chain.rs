use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::dynamics::{exact_a, Classification, Orbit};
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Serialize)]
pub struct StateLabel {
    pub state: usize,
    pub label: String,
}

/// Serializable matrix with state labels.
#[derive(Debug, Serialize)]
pub struct LumpedDump<'a> {
    pub dim: usize,
    pub p: f64,
    pub labels: Vec<StateLabel>,
    pub matrix: &'a [Vec<f64>],
}

/// Chain of `f(X_n) 1{tau > n}` with `f(T^k(0)) = k + 1`.
///
/// State 0 is absorbing; state `k + 1` is the level set of `f` containing
/// `T^k(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct LumpedChain {
    pub dim: usize,
    pub p: f64,
    /// Successor state after an up step (probability `p`), per transient state.
    pub up: Vec<usize>,
    /// Successor state after a down step (probability `q`), per transient state.
    pub down: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

impl LumpedChain {
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// The matrix without the absorbing row and column.
    pub fn transient_block(&self) -> Vec<Vec<f64>> {
        self.matrix[1..]
            .iter()
            .map(|row| row[1..].to_vec())
            .collect()
    }

    pub fn labels(&self) -> Vec<StateLabel> {
        (0..self.dim)
            .map(|s| StateLabel {
                state: s,
                label: if s == 0 {
                    "absorbed".into()
                } else {
                    format!("level set of T^{}(0)", s - 1)
                },
            })
            .collect()
    }

    /// Dense row-major CSV, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn dump(&self) -> LumpedDump<'_> {
        LumpedDump {
            dim: self.dim,
            p: self.p,
            labels: self.labels(),
            matrix: &self.matrix,
        }
    }
}

/// Builds the lumped chain from the exact orbit of zero.
///
/// The successor `y` of a state lands in the level set of the largest
/// orbit point not exceeding `y`, or in state 0 when `y < 0`.
pub fn build_lumped(params: &ModelParams, orbit: &Orbit) -> Result<LumpedChain> {
    let distinct = match orbit.classification() {
        Classification::Finite { kappa } => kappa + 1,
        Classification::EventuallyPeriodic { k0, period } => k0 + period,
        Classification::AperiodicUpTo { .. } => return Err(Error::InfiniteOrbit),
    };
    let points: Vec<BigRational> = (0..distinct)
        .map(|k| {
            orbit
                .exact_point(k)
                .ok_or_else(|| Error::Unsupported("lumped chain needs an exact orbit".into()))
        })
        .collect::<Result<_>>()?;
    let a = exact_a(params)?;
    let one = BigRational::one();

    let mut order: Vec<usize> = (0..distinct).collect();
    order.sort_by(|&i, &j| points[i].cmp(&points[j]));
    let state_of = |y: &BigRational| -> usize {
        let below = order.partition_point(|&i| &points[i] <= y);
        if below == 0 {
            0
        } else {
            order[below - 1] + 1
        }
    };

    let dim = distinct + 1;
    let (p, q) = (params.p(), params.q());
    let mut up = Vec::with_capacity(distinct);
    let mut down = Vec::with_capacity(distinct);
    let mut matrix = vec![vec![0.0; dim]; dim];
    matrix[0][0] = 1.0;
    for (k, x) in points.iter().enumerate() {
        let ax = &a * x;
        let (u, d) = (state_of(&(&ax + &one)), state_of(&(&ax - &one)));
        matrix[k + 1][u] += p;
        matrix[k + 1][d] += q;
        up.push(u);
        down.push(d);
    }
    Ok(LumpedChain {
        dim,
        p,
        up,
        down,
        matrix,
    })
}

/// `P_0(tau > n)`, the `n`-th power of the transient block applied to the
/// all-ones vector and read at state 1.
pub fn persistence_via_matrix(chain: &LumpedChain, n: usize) -> f64 {
    let m = chain.dim - 1;
    let (p, q) = (chain.p, chain.q());
    let mut f = vec![1.0; m + 1];
    f[0] = 0.0;
    let mut next = vec![0.0; m + 1];
    for _ in 0..n {
        for s in 0..m {
            next[s + 1] = p * f[chain.up[s]] + q * f[chain.down[s]];
        }
        std::mem::swap(&mut f, &mut next);
    }
    f[1]
}
