use num_rational::Ratio;
use radpersist::ModelParams;

/// A value of `a` as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AValue {
    Exact(u64, u64),
    Decimal { value: f64, num: u64, den: u64 },
}

impl AValue {
    /// Exact numerator and denominator, also for decimals.
    pub fn fraction(&self) -> (u64, u64) {
        match *self {
            AValue::Exact(n, d) => (n, d),
            AValue::Decimal { num, den, .. } => (num, den),
        }
    }

    pub fn params(&self, p: f64, experimental: bool) -> radpersist::Result<ModelParams> {
        match (*self, experimental) {
            (AValue::Exact(n, d), false) => ModelParams::rational(n, d, p),
            (AValue::Exact(n, d), true) => ModelParams::experimental_rational(n, d, p),
            (AValue::Decimal { value, .. }, false) => ModelParams::new(value, p),
            (AValue::Decimal { value, .. }, true) => ModelParams::experimental(value, p),
        }
    }
}

/// Parses `num/den`, an integer, or (only when `inexact`) a decimal.
pub fn parse_a(s: &str, inexact: bool) -> Result<AValue, String> {
    let s = s.trim();
    if s.contains('/') {
        let (n, d) = parse_fraction(s)?;
        return Ok(AValue::Exact(n, d));
    }
    if let Ok(n) = s.parse::<u64>() {
        return Ok(AValue::Exact(n, 1));
    }
    let (num, den) = parse_decimal(s)?;
    if !inexact {
        return Err(format!(
            "decimal a = {s} needs --inexact; write it as a fraction such as {num}/{den}"
        ));
    }
    Ok(AValue::Decimal {
        value: num as f64 / den as f64,
        num,
        den,
    })
}

pub fn parse_fraction(s: &str) -> Result<(u64, u64), String> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| format!("expected num/den, got {s:?}"))?;
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: u64 = d
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator in {s:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    let r = Ratio::new(n, d);
    Ok((*r.numer(), *r.denom()))
}

/// A plain decimal such as `0.501`, read exactly.
pub fn parse_decimal(s: &str) -> Result<(u64, u64), String> {
    let bad = || format!("expected a fraction or decimal, got {s:?}");
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac_v: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac_v))
        .ok_or_else(bad)?;
    let r = Ratio::new(num, den);
    Ok((*r.numer(), *r.denom()))
}

fn parse_rational_endpoint(s: &str) -> Result<(u64, u64), String> {
    if s.contains('/') {
        parse_fraction(s)
    } else {
        parse_decimal(s)
    }
}

fn split_grid(s: &str) -> Result<(&str, &str, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("grid must be lo:hi:n, got {s:?}"));
    };
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("bad point count in {s:?}"))?;
    if n == 0 {
        return Err("grid needs at least one point".into());
    }
    Ok((lo.trim(), hi.trim(), n))
}

/// `n` exact points from `lo` to `hi` inclusive.
pub fn parse_a_grid(s: &str) -> Result<Vec<(u64, u64)>, String> {
    let (lo, hi, n) = split_grid(s)?;
    let lo = parse_rational_endpoint(lo)?;
    let hi = parse_rational_endpoint(hi)?;
    let lo = Ratio::new(lo.0 as u128, lo.1 as u128);
    let hi = Ratio::new(hi.0 as u128, hi.1 as u128);
    if hi < lo {
        return Err("grid upper end is below the lower end".into());
    }
    if n == 1 {
        return to_u64(lo).map(|r| vec![r]);
    }
    let step = (hi - lo) / Ratio::from_integer((n - 1) as u128);
    (0..n)
        .map(|i| to_u64(lo + step * Ratio::from_integer(i as u128)))
        .collect()
}

fn to_u64(r: Ratio<u128>) -> Result<(u64, u64), String> {
    match (u64::try_from(*r.numer()), u64::try_from(*r.denom())) {
        (Ok(n), Ok(d)) => Ok((n, d)),
        _ => Err(format!("grid point {r} does not fit in 64 bits")),
    }
}

/// `n` evenly spaced reals from `lo` to `hi` inclusive.
pub fn parse_real_grid(s: &str) -> Result<Vec<f64>, String> {
    let (lo, hi, n) = split_grid(s)?;
    let lo: f64 = lo.parse().map_err(|_| format!("bad grid start {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad grid end {hi:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("bad grid range {lo}..{hi}"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect())
}
