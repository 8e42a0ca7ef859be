//! Rising factorials and gamma-function ratios.

use statrs::function::gamma::ln_gamma;

/// Largest `n` for which [`pochhammer`] multiplies directly instead of going
/// through log-gamma.
pub const DIRECT_PRODUCT_MAX: u64 = 64;

/// Rising factorial `(c)_n = c (c+1) ... (c+n-1)`, with `(c)_0 = 1`.
///
/// Small `n` uses the plain product, which is exact whenever every partial
/// product is representable. Larger `n` falls back to `exp(lnΓ(c+n) - lnΓ(c))`.
pub fn pochhammer(c: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if c == 0.0 {
        return 0.0;
    }
    if n <= DIRECT_PRODUCT_MAX || c < 0.0 {
        let mut acc = 1.0;
        for m in 0..n {
            acc *= c + m as f64;
        }
        return acc;
    }
    (ln_gamma(c + n as f64) - ln_gamma(c)).exp()
}

/// `(x)_n / n!`, accumulated as a product of ratios so that it stays finite
/// long after `(x)_n` and `n!` individually overflow.
pub fn rising_over_factorial(x: f64, n: u64) -> f64 {
    let mut acc = 1.0;
    for m in 0..n {
        let m = m as f64;
        acc *= (x + m) / (m + 1.0);
    }
    acc
}

/// Natural log of `(x)_n / n!`.
pub fn ln_rising_over_factorial(x: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if n <= DIRECT_PRODUCT_MAX {
        return rising_over_factorial(x, n).ln();
    }
    let nf = n as f64;
    ln_gamma(x + nf) - ln_gamma(x) - ln_gamma(nf + 1.0)
}

/// `Γ(x + c) / Γ(x)` for `x > 0`, `c >= 0`. Integer `c` reduces to a
/// Pochhammer product.
pub fn gamma_ratio(x: f64, c: f64) -> f64 {
    if let Some(n) = as_small_integer(c) {
        return pochhammer(x, n);
    }
    (ln_gamma(x + c) - ln_gamma(x)).exp()
}

/// `k!` as a float.
pub fn factorial(k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, m| acc * m as f64)
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k <= DIRECT_PRODUCT_MAX {
        factorial(k).ln()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Exact binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Tolerance used to decide that a real exponent is an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-12;

/// Returns `Some(n)` when `c` lies within [`INTEGER_TOLERANCE`] of a
/// nonnegative integer small enough to iterate over.
pub fn as_small_integer(c: f64) -> Option<u64> {
    let r = c.round();
    if (0.0..=1e9).contains(&r) && (c - r).abs() <= INTEGER_TOLERANCE {
        Some(r as u64)
    } else {
        None
    }
}
