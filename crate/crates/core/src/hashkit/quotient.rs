//! Quotienting pairs `(h, q)` on a universe `[2^r]`.
//!
//! `y = a·x mod 2^r` for an odd multiplier `a` is a bijection of `[2^r]`.
//! `h(x)` is the top `b` bits of `y` and `q(x)` the low `r − b` bits, so
//! `x = a⁻¹·(h·2^(r−b) + q) mod 2^r` and `lg‖h‖ + lg‖q‖ = r` exactly.

use super::mix3;
use crate::bitcore::bits::{ceil_lg, low_mask};
use crate::error::{Error, Result};

/// Upper bound on multiplier retries per set.
pub const MAX_ATTEMPTS: u32 = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientPair {
    r: u32,
    b: u32,
    a: u64,
    a_inv: u64,
}

/// Inverse of an odd `a` modulo `2^64` (Newton iteration).
pub fn odd_inverse(a: u64) -> u64 {
    debug_assert!(a & 1 == 1);
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// Reduced-key width for a set of `l` keys in an `r`-bit universe.
pub fn h_width(l: u64, r: u32) -> u32 {
    (ceil_lg(l.saturating_mul(l)) + 1).min(r)
}

/// Multiplier for a set of size `l`, retry number `attempt`, under `seed`.
pub fn multiplier(seed: u64, l: u64, attempt: u32) -> u64 {
    mix3(seed, ceil_lg(l) as u64, attempt as u64) | 1
}

impl QuotientPair {
    pub fn new(r: u32, b: u32, a: u64) -> Self {
        debug_assert!(b <= r && r <= 64);
        let a = (a | 1) & low_mask(r).max(1);
        let a_inv = odd_inverse(a) & low_mask(r);
        Self { r, b, a, a_inv }
    }

    #[inline]
    fn y(&self, x: u64) -> u64 {
        x.wrapping_mul(self.a) & low_mask(self.r)
    }

    #[inline]
    pub fn h(&self, x: u64) -> u64 {
        self.y(x) >> (self.r - self.b)
    }

    #[inline]
    pub fn q(&self, x: u64) -> u64 {
        self.y(x) & low_mask(self.r - self.b)
    }

    #[inline]
    pub fn reconstruct(&self, h: u64, q: u64) -> u64 {
        let y = (h << (self.r - self.b)) | q;
        y.wrapping_mul(self.a_inv) & low_mask(self.r)
    }

    pub fn h_bits(&self) -> u32 {
        self.b
    }

    pub fn q_bits(&self) -> u32 {
        self.r - self.b
    }

    /// `⌈lg ‖h‖⌉ + ⌈lg ‖q‖⌉ − ⌈lg m*⌉`; always 0 for this construction.
    pub fn range_excess(&self) -> i64 {
        self.b as i64 + (self.r - self.b) as i64 - self.r as i64
    }

    pub fn multiplier(&self) -> u64 {
        self.a
    }

    pub fn is_injective_on(&self, keys: &[u64]) -> bool {
        let mut hs: Vec<u64> = keys.iter().map(|&x| self.h(x)).collect();
        hs.sort_unstable();
        hs.windows(2).all(|w| w[0] != w[1])
    }
}

/// Finds a pair whose `h` is one-to-one on `keys ⊆ [2^r]`, trying the
/// multipliers `multiplier(seed, |keys|, 0), (…, 1), …`.
/// Returns the pair and the successful attempt number.
pub fn make_quotient_pair(keys: &[u64], r: u32, seed: u64) -> Result<(QuotientPair, u32)> {
    let l = keys.len() as u64;
    let b = h_width(l, r);
    for attempt in 0..MAX_ATTEMPTS {
        let pair = QuotientPair::new(r, b, multiplier(seed, l, attempt));
        if pair.is_injective_on(keys) {
            return Ok((pair, attempt));
        }
    }
    Err(Error::Construction(format!(
        "no injective multiplier for {l} keys in {MAX_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_is_exact() {
        for a in [1u64, 3, 0x9E37_79B9_7F4A_7C15, u64::MAX] {
            assert_eq!(a.wrapping_mul(odd_inverse(a)), 1);
        }
    }

    #[test]
    fn singleton_and_spread_keys() {
        let (p, _) = make_quotient_pair(&[17], 10, 1).unwrap();
        assert_eq!(p.h_bits(), 1);
        assert_eq!(p.reconstruct(p.h(17), p.q(17)), 17);
        let t = 6;
        let keys: Vec<u64> = (0..16).map(|i| i << t).collect();
        let (p, _) = make_quotient_pair(&keys, 10, 7).unwrap();
        assert!(p.is_injective_on(&keys));
        assert_eq!(p.range_excess(), 0);
    }

    #[test]
    fn invertible_over_universe_samples() {
        let keys: Vec<u64> = (0..100).map(|i| i * 977 % 4096).collect();
        let (p, _) = make_quotient_pair(&keys, 30, 99).unwrap();
        let mut x = 12345u64;
        for _ in 0..10_000 {
            x = super::super::mix64(x) & low_mask(30);
            assert_eq!(p.reconstruct(p.h(x), p.q(x)), x);
        }
    }
}
