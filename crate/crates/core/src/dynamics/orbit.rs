use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Serialize, Serializer};

use super::map::{branch_of, ratio_to_f64, select_branch, Branch};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Default iteration cap for orbit classification.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Points closer than this to `1` or to the left end of the hole are flagged.
pub const EPS_HOLE: f64 = 1e-12;

/// How an orbit computation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Finite { kappa: usize },
    EventuallyPeriodic { k0: usize, period: usize },
    AperiodicUpTo { n: usize },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Finite { kappa } => write!(f, "Finite({kappa})"),
            Classification::EventuallyPeriodic { k0, period } => {
                write!(f, "EventuallyPeriodic({k0},{period})")
            }
            Classification::AperiodicUpTo { n } => write!(f, "AperiodicUpTo({n})"),
        }
    }
}

/// An index that may be infinite or only bounded from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    Finite(usize),
    Infinite,
    AtLeast(usize),
}

impl Extent {
    pub fn finite(self) -> Option<usize> {
        match self {
            Extent::Finite(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(k) => write!(f, "{k}"),
            Extent::Infinite => write!(f, "inf"),
            Extent::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(k) => s.serialize_u64(*k as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Point `k` equals `nums[k] / (start_den * a_num^k)`.
#[derive(Debug, Clone)]
struct ExactTrace {
    nums: Vec<BigInt>,
    start_den: BigInt,
    a_num: BigInt,
}

impl ExactTrace {
    fn point(&self, k: usize) -> BigRational {
        let den = &self.start_den * Pow::pow(&self.a_num, k as u64);
        BigRational::new(self.nums[k].clone(), den)
    }
}

/// Trajectory of a point under `T_a`.
#[derive(Debug, Clone)]
pub struct Orbit {
    start: f64,
    points: Vec<f64>,
    deltas: Vec<bool>,
    occ: Vec<usize>,
    classification: Classification,
    exact: Option<ExactTrace>,
    near_boundary: Vec<usize>,
}

impl Orbit {
    fn from_parts(
        start: f64,
        points: Vec<f64>,
        deltas: Vec<bool>,
        classification: Classification,
        exact: Option<ExactTrace>,
        near_boundary: Vec<usize>,
    ) -> Self {
        let mut occ = Vec::with_capacity(deltas.len() + 1);
        occ.push(0);
        for (k, &d) in deltas.iter().enumerate() {
            occ.push(occ[k] + d as usize);
        }
        Self {
            start,
            points,
            deltas,
            occ,
            classification,
            exact,
            near_boundary,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    /// Number of stored points. Periodic orbits also store the first repeat.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn deltas(&self) -> &[bool] {
        &self.deltas
    }

    /// `L_k` for `k = 0..=len`.
    pub fn occ(&self) -> &[usize] {
        &self.occ
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Indices of points within [`EPS_HOLE`] of a discontinuity of `T_a`.
    pub fn near_boundary(&self) -> &[usize] {
        &self.near_boundary
    }

    pub fn kappa(&self) -> Extent {
        match self.classification {
            Classification::Finite { kappa } => Extent::Finite(kappa),
            Classification::EventuallyPeriodic { .. } => Extent::Infinite,
            Classification::AperiodicUpTo { n } => Extent::AtLeast(n),
        }
    }

    pub fn kappa_prime(&self) -> Extent {
        match self.classification {
            Classification::Finite { kappa } => Extent::Finite(kappa),
            Classification::EventuallyPeriodic { k0, period } => Extent::Finite(k0 + period - 1),
            Classification::AperiodicUpTo { n } => Extent::AtLeast(n),
        }
    }

    /// Number of distinct points, `kappa' + 1`, when finite.
    pub fn distinct_len(&self) -> Option<usize> {
        self.kappa_prime().finite().map(|k| k + 1)
    }

    fn fold(&self, k: usize) -> Option<(usize, usize)> {
        match self.classification {
            Classification::EventuallyPeriodic { k0, period } if k >= k0 => {
                let m = k - k0;
                Some((k0 + m % period, m / period))
            }
            _ if k < self.points.len() => Some((k, 0)),
            _ => None,
        }
    }

    /// `delta_k`, extended periodically past the stored points.
    pub fn delta_at(&self, k: usize) -> Option<bool> {
        self.fold(k).map(|(i, _)| self.deltas[i])
    }

    pub fn point_at(&self, k: usize) -> Option<f64> {
        self.fold(k).map(|(i, _)| self.points[i])
    }

    /// `L_k`, extended periodically past the stored points.
    pub fn occ_at(&self, k: usize) -> Option<usize> {
        match self.classification {
            Classification::EventuallyPeriodic { k0, period } if k >= k0 => {
                let per_cycle = self.occ[k0 + period] - self.occ[k0];
                let m = k - k0;
                Some(self.occ[k0 + m % period] + (m / period) * per_cycle)
            }
            _ if k <= self.points.len() => Some(self.occ[k]),
            _ => None,
        }
    }

    /// Point `k` as a reduced fraction, for orbits computed exactly.
    pub fn exact_point(&self, k: usize) -> Option<BigRational> {
        let trace = self.exact.as_ref()?;
        (k < trace.nums.len()).then(|| trace.point(k))
    }

    /// Serializable summary; points are `num/den` strings for exact orbits.
    pub fn to_record(&self, params: &ModelParams) -> OrbitRecord {
        let points = (0..self.len())
            .map(|k| match self.exact_point(k) {
                Some(x) => format!("{}/{}", x.numer(), x.denom()),
                None => format!("{}", self.points[k]),
            })
            .collect();
        let (k0, period) = match self.classification {
            Classification::EventuallyPeriodic { k0, period } => (Some(k0), Some(period)),
            _ => (None, None),
        };
        OrbitRecord {
            a: params.a_label(),
            points,
            deltas: self.deltas.iter().map(|&d| d as u8).collect(),
            kappa: self.kappa(),
            kappa_prime: self.kappa_prime(),
            classification: self.classification.to_string(),
            k0,
            period,
        }
    }
}

/// JSON shape of an orbit.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub a: String,
    pub points: Vec<String>,
    pub deltas: Vec<u8>,
    pub kappa: Extent,
    pub kappa_prime: Extent,
    pub classification: String,
    pub k0: Option<usize>,
    pub period: Option<usize>,
}

/// Orbit of zero in exact arithmetic.
pub fn orbit_of_zero(params: &ModelParams, max_iter: usize) -> Result<Orbit> {
    orbit_of_rational(params, &BigRational::zero(), max_iter)
}

/// Exact orbit of a rational start point. Requires a rational `a`.
pub fn orbit_of_rational(
    params: &ModelParams,
    start: &BigRational,
    max_iter: usize,
) -> Result<Orbit> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    let (n, d) = params
        .exact_a()
        .ok_or_else(|| Error::InvalidParameter("exact orbit needs a rational a".into()))?;
    let (n_big, d_big) = (BigInt::from(n), BigInt::from(d));
    let gap = BigInt::from(d - n);
    let lo_num = BigInt::from(2 * n as i128 - d as i128);

    let mut num = start.numer().clone();
    let mut den = start.denom().clone();
    if num < BigInt::zero() || &num * &gap > &d_big * &den {
        return Err(Error::OutOfDomain {
            x: ratio_to_f64(&num, &den),
            ceiling: params.ceiling(),
        });
    }
    let start_den = den.clone();

    let mut nums = Vec::new();
    let mut points = Vec::new();
    let mut deltas = Vec::new();
    let mut buckets: HashMap<i64, Vec<usize>> = HashMap::new();
    let classification;

    let bucket = |x: f64| (x * (1u64 << 40) as f64).floor() as i64;

    loop {
        let k = points.len();
        let x = ratio_to_f64(&num, &den);
        points.push(x);
        buckets.entry(bucket(x)).or_default().push(k);
        let vs_one = num.cmp(&den);
        let vs_lo = (&num * &gap).cmp(&(&lo_num * &den));
        deltas.push(vs_one == std::cmp::Ordering::Less);
        let branch = select_branch(params, vs_one, vs_lo);
        nums.push(num.clone());
        if branch == Branch::Hole {
            classification = Classification::Finite { kappa: k };
            break;
        }
        if points.len() == max_iter {
            classification = Classification::AperiodicUpTo { n: max_iter };
            break;
        }
        num = match branch {
            Branch::Lower => &d_big * (&num + &den),
            _ => &d_big * (&num - &den),
        };
        den = &den * &n_big;

        let next = ratio_to_f64(&num, &den);
        let b = bucket(next);
        let mut repeat = None;
        for key in [b - 1, b, b + 1] {
            if let Some(ids) = buckets.get(&key) {
                for &j in ids {
                    let scale: BigInt = Pow::pow(&n_big, (k + 1 - j) as u64);
                    if &nums[j] * scale == num {
                        repeat = Some(repeat.map_or(j, |r: usize| r.min(j)));
                    }
                }
            }
        }
        if let Some(j) = repeat {
            points.push(points[j]);
            deltas.push(deltas[j]);
            nums.push(num.clone());
            classification = Classification::EventuallyPeriodic {
                k0: j,
                period: k + 1 - j,
            };
            break;
        }
    }

    let near = flag_boundary(params, &points);
    let trace = ExactTrace {
        nums,
        start_den,
        a_num: n_big,
    };
    Ok(Orbit::from_parts(
        ratio_to_f64(start.numer(), start.denom()),
        points,
        deltas,
        classification,
        Some(trace),
        near,
    ))
}

fn flag_boundary(params: &ModelParams, points: &[f64]) -> Vec<usize> {
    let lo = params.hole_lo();
    points
        .iter()
        .enumerate()
        .filter(|(_, &x)| (x - 1.0).abs() < EPS_HOLE || (lo >= 0.0 && (x - lo).abs() < EPS_HOLE))
        .map(|(k, _)| k)
        .collect()
}

/// Floating point orbit of an arbitrary start point.
///
/// Iterates are clamped to the invariant interval so that rounding at the
/// fixed point `1/(1-a)` cannot push the orbit out of the domain, and
/// iterates within [`EPS_HOLE`] of an edge of the hole are moved onto it.
pub fn orbit_of(params: &ModelParams, x: f64, max_iter: usize) -> Result<Orbit> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    let ceiling = params.ceiling();
    branch_of(params, x)?;
    let a = params.a();
    let hole_lo = params.hole_lo();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut deltas = Vec::new();
    let mut cur = x.min(ceiling);
    let classification = loop {
        let k = points.len();
        points.push(cur);
        deltas.push(cur < 1.0);
        seen.insert(cur.to_bits(), k);
        let branch = branch_of(params, cur)?;
        if branch == Branch::Hole {
            break Classification::Finite { kappa: k };
        }
        if points.len() == max_iter {
            break Classification::AperiodicUpTo { n: max_iter };
        }
        cur = match branch {
            Branch::Lower => (cur + 1.0) / a,
            _ => (cur - 1.0) / a,
        }
        .clamp(0.0, ceiling);
        if (cur - 1.0).abs() < EPS_HOLE {
            cur = 1.0;
        } else if (cur - hole_lo).abs() < EPS_HOLE {
            cur = hole_lo;
        }
        if let Some(&j) = seen.get(&cur.to_bits()) {
            points.push(points[j]);
            deltas.push(deltas[j]);
            break Classification::EventuallyPeriodic {
                k0: j,
                period: k + 1 - j,
            };
        }
    };
    let near = flag_boundary(params, &points);
    Ok(Orbit::from_parts(
        x,
        points,
        deltas,
        classification,
        None,
        near,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(s: &str) -> BigRational {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        BigRational::new(n.parse().unwrap(), d.parse().unwrap())
    }

    #[test]
    fn two_thirds_prefix() {
        let m = ModelParams::rational(2, 3, 0.5).unwrap();
        let o = orbit_of_zero(&m, 6).unwrap();
        let want = ["0", "3/2", "3/4", "21/8", "39/16", "69/32"];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(o.exact_point(k).unwrap(), frac(w), "point {k}");
        }
        assert_eq!(o.deltas(), &[true, false, true, false, false, false]);
        assert_eq!(o.classification(), Classification::AperiodicUpTo { n: 6 });
        assert_eq!(o.kappa(), Extent::AtLeast(6));
        let long = orbit_of_zero(&m, 9).unwrap();
        assert_eq!(long.exact_point(6).unwrap(), frac("111/64"));
        assert_eq!(long.exact_point(7).unwrap(), frac("141/128"));
        assert_eq!(long.exact_point(8).unwrap(), frac("39/256"));
        assert!(long.deltas()[8]);
    }

    #[test]
    fn golden_mean_is_periodic() {
        let m = ModelParams::new((5f64.sqrt() - 1.0) / 2.0, 0.5).unwrap();
        let o = orbit_of(&m, 0.0, 100).unwrap();
        assert_eq!(
            o.classification(),
            Classification::EventuallyPeriodic { k0: 0, period: 3 }
        );
        assert_eq!(o.points()[2], 1.0);
        assert_eq!(o.deltas(), &[true, false, false, true]);
    }

    #[test]
    fn finite_at_063() {
        let m = ModelParams::rational(63, 100, 0.5).unwrap();
        let o = orbit_of_zero(&m, 10).unwrap();
        assert_eq!(o.classification(), Classification::Finite { kappa: 2 });
        assert_eq!(o.exact_point(1).unwrap(), frac("100/63"));
        assert_eq!(o.exact_point(2).unwrap(), frac("3700/3969"));
        assert_eq!(o.deltas(), &[true, false, true]);
        assert_eq!(o.occ(), &[0, 1, 1, 2]);
        assert_eq!(o.kappa_prime(), Extent::Finite(2));
    }

    #[test]
    fn half_is_fixed_point() {
        let m = ModelParams::rational(1, 2, 0.5).unwrap();
        let o = orbit_of_zero(&m, 10).unwrap();
        assert_eq!(
            o.classification(),
            Classification::EventuallyPeriodic { k0: 1, period: 1 }
        );
        assert_eq!(o.points(), &[0.0, 2.0, 2.0]);
        assert_eq!(o.kappa(), Extent::Infinite);
        assert_eq!(o.kappa_prime(), Extent::Finite(1));
        assert_eq!(o.delta_at(100), Some(false));
        assert_eq!(o.occ_at(100), Some(1));
    }

    #[test]
    fn periodic_extension() {
        // 0 -> 5/3 -> 10/9 -> 5/27 -> ... at a = 3/5 is finite; use the
        // purely periodic orbit of the ceiling instead
        let m = ModelParams::rational(3, 5, 0.5).unwrap();
        let o = orbit_of_rational(&m, &frac("5/2"), 10).unwrap();
        assert_eq!(
            o.classification(),
            Classification::EventuallyPeriodic { k0: 0, period: 1 }
        );
        assert_eq!(o.occ_at(7), Some(0));
    }

    #[test]
    fn float_orbit_matches_exact_prefix() {
        let m = ModelParams::rational(3, 5, 0.5).unwrap();
        let o = orbit_of(&m, 0.0, 5).unwrap();
        let want = [
            0.0,
            5.0 / 3.0,
            10.0 / 9.0,
            5.0 / 27.0,
            1.975_308_641_975_308_6,
        ];
        for (x, w) in o.points().iter().zip(want) {
            assert!((x - w).abs() < 1e-12);
        }
        assert_eq!(o.deltas(), &[true, false, false, true, false]);
        let top = ModelParams::rational(2, 3, 0.5).unwrap();
        let c = orbit_of(&top, 3.0, 10).unwrap();
        assert_eq!(
            c.classification(),
            Classification::EventuallyPeriodic { k0: 0, period: 1 }
        );
        let m63 = ModelParams::rational(63, 100, 0.5).unwrap();
        assert_eq!(orbit_of(&m63, 0.9, 10).unwrap().kappa(), Extent::Finite(0));
        assert!(orbit_of(&m63, 3.0, 10).is_err());
    }

    #[test]
    fn record_json_shape() {
        let m = ModelParams::rational(63, 100, 0.5).unwrap();
        let rec = orbit_of_zero(&m, 10).unwrap().to_record(&m);
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["a"], "63/100");
        assert_eq!(v["points"][2], "3700/3969");
        assert_eq!(v["kappa"], 2);
        let h = ModelParams::rational(1, 2, 0.5).unwrap();
        let v = serde_json::to_value(orbit_of_zero(&h, 10).unwrap().to_record(&h)).unwrap();
        assert_eq!(v["kappa"], "inf");
        assert_eq!(v["k0"], 1);
    }
}
