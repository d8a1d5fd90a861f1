use super::series::SeriesValue;

/// Terms of each saltus series kept by [`parry_density`].
const TERMS: usize = 120;

/// Invariant density of `y -> 3y/2 + 1/2 (mod 1)`, unnormalised and moved
/// to `[0, 3]`:
/// `h(x) = sum_k a^{k+1} (1{T^k(0) <= x/3} - 1{T^k(1) <= x/3})`, `a = 2/3`.
///
/// Both orbits are dyadic, `T^k(y) = N_k / 2^k`, and are iterated exactly.
pub fn parry_density(x: f64) -> SeriesValue {
    let a = 2.0 / 3.0;
    let mut from_zero: u128 = 0;
    let mut from_one: u128 = 1;
    let mut value = 0.0;
    let mut weight = a;
    for k in 0..TERMS {
        let scale = (k as f64).exp2();
        if 3.0 * (from_zero as f64 / scale) <= x {
            value += weight;
        }
        if 3.0 * (from_one as f64 / scale) <= x {
            value -= weight;
        }
        let step = |n: u128| (3 * n + (1u128 << k)) % (1u128 << (k + 1));
        from_zero = step(from_zero);
        from_one = step(from_one);
        weight *= a;
    }
    SeriesValue {
        value,
        tail_bound: 2.0 * weight / (1.0 - a),
        truncation: TERMS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_inside() {
        for i in 1..300 {
            assert!(parry_density(3.0 * i as f64 / 300.0).value > 0.0);
        }
    }
}
