//! Exact information-theoretic bounds.
//!
//! `⌈lg X⌉` for a huge integer ratio `X` is evaluated in two steps. A
//! floating-point estimate with a proven error radius settles the ceiling
//! whenever the estimate is not within that radius of an integer; otherwise
//! the value is recomputed with arbitrary-precision integers.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `⌈lg X⌉` = bit length of `X − 1` for `X ≥ 2`, and 0 for `X = 1`.
pub fn ceil_lg_big(x: &BigUint) -> u64 {
    assert!(!x.is_zero(), "lg of zero");
    if x.is_one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

fn product(lo: u64, hi: u64) -> BigUint {
    // Product of lo..=hi via a balanced tree.
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        let mut acc = BigUint::from(lo);
        for v in lo + 1..=hi {
            acc *= v;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    product(lo, mid) * product(mid + 1, hi)
}

/// `C(m, n)` as a big integer.
pub fn binomial_big(m: u64, n: u64) -> BigUint {
    if n > m {
        return BigUint::zero();
    }
    let n = n.min(m - n);
    if n == 0 {
        return BigUint::one();
    }
    product(m - n + 1, m) / product(1, n)
}

/// `lg C(m, n)` in floating point together with an absolute error bound.
pub fn lg_binomial_estimate(m: u64, n: u64) -> (f64, f64) {
    let n = n.min(m - n);
    if n == 0 {
        return (0.0, 0.0);
    }
    if n <= 1 << 16 {
        let mut sum = 0.0f64;
        for i in 0..n {
            sum += ((m - i) as f64 / (i + 1) as f64).log2();
        }
        // Each term is within a few ulps of a value below 64.
        let err = n as f64 * 64.0 * 8.0 * f64::EPSILON + 1e-12;
        return (sum, err);
    }
    let (mf, nf, kf) = (m as f64, n as f64, (m - n) as f64);
    // Stirling with the large terms regrouped to avoid cancellation:
    // m ln m − n ln n − k ln k = n ln(m/n) − k ln(1 − n/m).
    let main = nf * (mf / nf).ln() - kf * (-(nf / mf)).ln_1p();
    let half = 0.5 * (mf.ln() - nf.ln() - kf.ln()) - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let corr = |x: f64| 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
    let ln_c = main + half + corr(mf) - corr(nf) - corr(kf);
    let lg = ln_c / std::f64::consts::LN_2;
    let err = lg.abs() * 64.0 * f64::EPSILON + 1e-9;
    (lg, err)
}

fn certified_ceil(estimate: f64, err: f64) -> Option<u64> {
    let lo = (estimate - err).ceil();
    let hi = (estimate + err).ceil();
    if lo == hi && lo >= 0.0 {
        Some(lo as u64)
    } else {
        None
    }
}

/// `B(n, m) = ⌈lg C(m, n)⌉`, exact.
pub fn info_bound(n: u64, m: u64) -> Result<u64> {
    if n > m {
        return Err(Error::InvalidInput(format!(
            "info_bound: n = {n} exceeds m = {m}"
        )));
    }
    let (est, err) = lg_binomial_estimate(m, n);
    if let Some(v) = certified_ceil(est, err) {
        return Ok(v);
    }
    info_bound_exact(n, m)
}

/// `B(n, m)` always via big integers.
pub fn info_bound_exact(n: u64, m: u64) -> Result<u64> {
    if n > m {
        return Err(Error::InvalidInput(format!(
            "info_bound: n = {n} exceeds m = {m}"
        )));
    }
    Ok(ceil_lg_big(&binomial_big(m, n)))
}

/// `⌈lg(C(kn+1, n)/(kn+1))⌉`, the number of bits needed to distinguish all
/// `k`-ary cardinal trees with `n` nodes.
pub fn ktree_bound(n: u64, k: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "ktree_bound: n must be at least 1".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidInput(
            "ktree_bound: k must be at least 1".into(),
        ));
    }
    let kn1 = k
        .checked_mul(n)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::InvalidInput("ktree_bound: kn + 1 overflows".into()))?;
    let (est, err) = lg_binomial_estimate(kn1, n);
    let est = est - (kn1 as f64).log2();
    if let Some(v) = certified_ceil(est, err + 1e-12) {
        return Ok(v);
    }
    ktree_bound_exact(n, k)
}

pub fn ktree_bound_exact(n: u64, k: u64) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput(
            "ktree_bound: n and k must be at least 1".into(),
        ));
    }
    let kn1 = k * n + 1;
    let count = binomial_big(kn1, n) / kn1;
    Ok(ceil_lg_big(&count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_bound_examples() {
        assert_eq!(info_bound(0, 10).unwrap(), 0);
        assert_eq!(info_bound(2, 4).unwrap(), 3);
        assert_eq!(info_bound(3, 8).unwrap(), 6);
        assert!(info_bound(5, 4).is_err());
    }

    #[test]
    fn ktree_bound_examples() {
        for k in 1..10 {
            assert_eq!(ktree_bound(1, k).unwrap(), 0);
        }
        // 55 ternary trees with 4 nodes, 2 binary trees with 2 nodes.
        assert_eq!(ktree_bound(4, 3).unwrap(), 6);
        assert_eq!(ktree_bound(2, 2).unwrap(), 1);
        assert!(ktree_bound(3, 0).is_err());
        assert!(ktree_bound(0, 3).is_err());
    }

    #[test]
    fn binomial_big_small_values() {
        assert_eq!(binomial_big(4, 2), BigUint::from(6u32));
        assert_eq!(binomial_big(8, 3), BigUint::from(56u32));
        assert_eq!(binomial_big(13, 4), BigUint::from(715u32));
        assert_eq!(binomial_big(3, 5), BigUint::zero());
    }

    #[test]
    fn fast_path_agrees_with_exact() {
        let cases = [
            (1u64, 1u64),
            (1, 2),
            (5, 10),
            (31, 64),
            (500, 1000),
            (1000, 1 << 20),
            (70_000, 140_000),
            (65_537, 1 << 20),
            (100_000, 1 << 32),
        ];
        for (n, m) in cases {
            assert_eq!(
                info_bound(n, m).unwrap(),
                info_bound_exact(n, m).unwrap(),
                "{n} {m}"
            );
        }
        for (n, k) in [(2u64, 2u64), (10, 3), (300, 4), (70_000, 4), (5000, 1024)] {
            assert_eq!(ktree_bound(n, k).unwrap(), ktree_bound_exact(n, k).unwrap());
        }
    }

    #[test]
    fn exact_powers_of_two() {
        // C(2^j, 1) = 2^j sits exactly on an integer logarithm.
        for j in 1..40 {
            assert_eq!(info_bound(1, 1 << j).unwrap(), j);
        }
    }
}
