//! In-word population count and select.

use crate::error::{Error, Result};

const ONES_STEP_8: u64 = 0x0101_0101_0101_0101;

#[inline]
pub fn popcount_word(w: u64) -> u32 {
    w.count_ones()
}

/// Position of the `j`-th set bit of `w` (1-based `j`), counting from the
/// least significant bit.
pub fn select_in_word(w: u64, j: u32) -> Result<u32> {
    if j == 0 || j > w.count_ones() {
        return Err(Error::OutOfRange(format!(
            "select_in_word: rank {j} not in 1..={}",
            w.count_ones()
        )));
    }
    Ok(select_in_word_unchecked(w, j - 1))
}

/// Position of the set bit with zero-based rank `k`; `k < popcount(w)`.
#[inline]
pub fn select_in_word_unchecked(w: u64, k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    // Byte-wise prefix popcounts, then a byte-level lookup.
    let mut s = w - ((w >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    let prefix = s.wrapping_mul(ONES_STEP_8);
    // Bytes whose inclusive prefix count is <= k.
    let kk = (k as u64).wrapping_mul(ONES_STEP_8);
    let le = (((kk | 0x8080_8080_8080_8080) - prefix) & 0x8080_8080_8080_8080) >> 7;
    let byte = le.wrapping_mul(ONES_STEP_8) >> 56;
    let byte = byte as u32;
    let before = if byte == 0 {
        0
    } else {
        ((prefix >> (8 * (byte - 1))) & 0xFF) as u32
    };
    let b = ((w >> (8 * byte)) & 0xFF) as usize;
    8 * byte + SELECT_IN_BYTE[b * 8 + (k - before) as usize] as u32
}

static SELECT_IN_BYTE: [u8; 256 * 8] = build_select_in_byte();

const fn build_select_in_byte() -> [u8; 256 * 8] {
    let mut t = [0u8; 256 * 8];
    let mut b = 0;
    while b < 256 {
        let mut seen = 0;
        let mut i = 0;
        while i < 8 {
            if (b >> i) & 1 == 1 {
                t[b * 8 + seen] = i as u8;
                seen += 1;
            }
            i += 1;
        }
        b += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn select_scan(w: u64, j: u32) -> u32 {
        let mut seen = 0;
        for i in 0..64 {
            if (w >> i) & 1 == 1 {
                seen += 1;
                if seen == j {
                    return i;
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn examples() {
        assert_eq!(popcount_word(0), 0);
        assert_eq!(popcount_word(u64::MAX), 64);
        assert_eq!(popcount_word(0b1011), 3);
        assert_eq!(select_in_word(0b1011, 1).unwrap(), 0);
        assert_eq!(select_in_word(0b1011, 3).unwrap(), 3);
        assert_eq!(select_in_word(1, 1).unwrap(), 0);
        assert!(select_in_word(0b1011, 4).is_err());
        assert!(select_in_word(0b1011, 0).is_err());
    }

    #[test]
    fn matches_scan_on_patterns() {
        let mut x = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..2000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            for w in [x, x & (x >> 3), u64::MAX, 1 << 63, x | 1] {
                for j in 1..=w.count_ones() {
                    assert_eq!(
                        select_in_word(w, j).unwrap(),
                        select_scan(w, j),
                        "{w:#x} {j}"
                    );
                }
            }
        }
    }
}
