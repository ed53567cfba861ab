//! Factorials, binomials and powers of `i` shared by the Hermite routines.

use crate::C64;

/// `ln n!` by direct accumulation of `ln k`.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Exact binomial coefficient, zero when `k > n`. Exact in `u64` for `n <= 66`.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// Binomial over signed arguments with `C(a, b) = 0` outside `0 <= b <= a`.
pub(crate) fn binomial_signed(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        binomial(a as usize, b as usize)
    }
}

/// `i^k` computed from `k mod 4`.
pub(crate) fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}
