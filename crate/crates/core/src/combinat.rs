use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// `C(n, r)` for nonnegative `n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` as the degree-`r` polynomial `n(n-1)...(n-r+1)/r!`, valid for
/// negative `n` as well.
pub fn binomial_poly(n: i64, r: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r as i64 {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
