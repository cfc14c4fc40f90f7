//! Enumerative coding of fixed-width blocks by (class, offset).
//!
//! Within a class the blocks are ordered lexicographically with block bit 0
//! as the most significant digit, so `"0101"` is offset 1 among the six
//! weight-2 strings of length 4 and `"1100"` is offset 5.

use std::sync::OnceLock;

use super::bits::ceil_lg;
use crate::error::{Error, Result};

pub const MAX_U: usize = 63;
/// Largest block width with a materialized decode table.
pub const MAX_TABLE_U: u32 = 16;

pub struct BinomialTable {
    max_u: usize,
    entries: Vec<u64>,
}

impl BinomialTable {
    pub fn new(max_u: usize) -> Self {
        assert!(max_u <= MAX_U, "C({max_u}, ·) may overflow a word");
        let stride = max_u + 1;
        let mut entries = vec![0u64; stride * stride];
        for a in 0..=max_u {
            entries[a * stride] = 1;
            for b in 1..=a {
                entries[a * stride + b] =
                    entries[(a - 1) * stride + b - 1] + entries[(a - 1) * stride + b];
            }
        }
        Self { max_u, entries }
    }

    pub fn max_u(&self) -> usize {
        self.max_u
    }

    /// `C(a, b)`, zero when `b > a`.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.entries[a * (self.max_u + 1) + b]
        }
    }
}

pub fn binomials() -> &'static BinomialTable {
    static TABLE: OnceLock<BinomialTable> = OnceLock::new();
    TABLE.get_or_init(|| BinomialTable::new(MAX_U))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockCode {
    pub class: u32,
    pub offset: u64,
    pub width_bits: u32,
}

/// Bits needed for offsets of class `class` in a `u`-bit block.
#[inline]
pub fn offset_width(u: u32, class: u32) -> u32 {
    ceil_lg(binomials().get(u as usize, class as usize))
}

/// Encodes the low `u` bits of `bits` (block bit `j` = bit `j` of the word).
pub fn encode_block(bits: u64, u: u32) -> BlockCode {
    assert!(u as usize <= MAX_U);
    let t = binomials();
    let class = (bits & super::bits::low_mask(u)).count_ones();
    let mut remaining = class as usize;
    let mut offset = 0u64;
    let mut j = 0u32;
    while remaining > 0 {
        if (bits >> j) & 1 == 1 {
            offset += t.get((u - j - 1) as usize, remaining);
            remaining -= 1;
        }
        j += 1;
    }
    BlockCode {
        class,
        offset,
        width_bits: offset_width(u, class),
    }
}

pub fn decode_block(code: BlockCode, u: u32) -> Result<u64> {
    if u as usize > MAX_U || code.class > u {
        return Err(Error::InvalidInput(format!(
            "class {} invalid for block width {u}",
            code.class
        )));
    }
    let count = binomials().get(u as usize, code.class as usize);
    if code.offset >= count {
        return Err(Error::InvalidInput(format!(
            "offset {} not below C({u}, {}) = {count}",
            code.offset, code.class
        )));
    }
    Ok(decode_walk(code.class, code.offset, u))
}

/// Greedy binomial walk; `O(u)`.
#[inline]
pub fn decode_walk(class: u32, mut offset: u64, u: u32) -> u64 {
    let t = binomials();
    let mut remaining = class as usize;
    let mut bits = 0u64;
    let mut j = 0u32;
    while remaining > 0 {
        let zero_here = t.get((u - j - 1) as usize, remaining);
        if offset >= zero_here {
            offset -= zero_here;
            bits |= 1 << j;
            remaining -= 1;
        }
        j += 1;
    }
    bits
}

/// Lookup table listing every `u`-bit block grouped by class in offset order.
#[derive(Debug)]
pub struct DecodeTable {
    u: u32,
    class_start: Vec<u32>,
    blocks: Vec<u16>,
}

impl DecodeTable {
    fn build(u: u32) -> Self {
        assert!(u <= MAX_TABLE_U);
        let t = binomials();
        let mut class_start = Vec::with_capacity(u as usize + 2);
        let mut acc = 0u32;
        for c in 0..=u {
            class_start.push(acc);
            acc += t.get(u as usize, c as usize) as u32;
        }
        class_start.push(acc);
        let mut blocks = vec![0u16; acc as usize];
        for b in 0..(1u64 << u) {
            let code = encode_block(b, u);
            blocks[(class_start[code.class as usize] as u64 + code.offset) as usize] = b as u16;
        }
        Self {
            u,
            class_start,
            blocks,
        }
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    #[inline]
    pub fn decode(&self, class: u32, offset: u64) -> u64 {
        self.blocks[self.class_start[class as usize] as usize + offset as usize] as u64
    }
}

/// Shared decode table for block width `u ≤ 16`.
pub fn decode_table(u: u32) -> &'static DecodeTable {
    static TABLES: [OnceLock<DecodeTable>; MAX_TABLE_U as usize + 1] =
        [const { OnceLock::new() }; MAX_TABLE_U as usize + 1];
    TABLES[u as usize].get_or_init(|| DecodeTable::build(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::bits::BitVector;

    fn block(s: &str) -> u64 {
        BitVector::from_str_bits(s).get_bits(0, s.len() as u32)
    }

    #[test]
    fn pascal_rule() {
        let t = binomials();
        for a in 1..=MAX_U {
            assert_eq!(t.get(a, 0), 1);
            assert_eq!(t.get(a, a), 1);
            for b in 1..a {
                assert_eq!(t.get(a, b), t.get(a - 1, b - 1) + t.get(a - 1, b));
            }
        }
        assert_eq!(t.get(63, 31), 916_312_070_471_295_267);
    }

    #[test]
    fn spec_block_examples() {
        let c = encode_block(block("0000"), 4);
        assert_eq!((c.class, c.offset), (0, 0));
        let c = encode_block(block("0101"), 4);
        assert_eq!((c.class, c.offset), (2, 1));
        assert_eq!(c.width_bits, 3);
        let c = encode_block(block("1100"), 4);
        assert_eq!((c.class, c.offset), (2, 5));
        assert_eq!(
            decode_block(
                BlockCode {
                    class: 0,
                    offset: 0,
                    width_bits: 0
                },
                4
            )
            .unwrap(),
            0
        );
        assert_eq!(
            decode_block(
                BlockCode {
                    class: 2,
                    offset: 1,
                    width_bits: 3
                },
                4
            )
            .unwrap(),
            block("0101")
        );
        assert_eq!(
            decode_block(
                BlockCode {
                    class: 4,
                    offset: 0,
                    width_bits: 0
                },
                4
            )
            .unwrap(),
            block("1111")
        );
        assert!(decode_block(
            BlockCode {
                class: 5,
                offset: 0,
                width_bits: 0
            },
            4
        )
        .is_err());
        assert!(decode_block(
            BlockCode {
                class: 2,
                offset: 6,
                width_bits: 3
            },
            4
        )
        .is_err());
    }

    /// Offsets are the positions in a lexicographic enumeration that treats
    /// block bit 0 as the leading character.
    #[test]
    fn offsets_match_sorted_enumeration() {
        for u in 1..=10u32 {
            for class in 0..=u {
                let mut strings: Vec<String> = (0..1u64 << u)
                    .filter(|b| b.count_ones() == class)
                    .map(|b| {
                        (0..u)
                            .map(|j| if (b >> j) & 1 == 1 { '1' } else { '0' })
                            .collect()
                    })
                    .collect();
                strings.sort();
                for (rank, s) in strings.iter().enumerate() {
                    assert_eq!(encode_block(block(s), u).offset, rank as u64, "{s}");
                }
            }
        }
    }

    #[test]
    fn exhaustive_round_trip_all_table_widths() {
        for u in 0..=MAX_TABLE_U {
            let table = decode_table(u);
            for b in 0..(1u64 << u) {
                let code = encode_block(b, u);
                assert!(code.offset < binomials().get(u as usize, code.class as usize));
                assert_eq!(decode_block(code, u).unwrap(), b);
                assert_eq!(table.decode(code.class, code.offset), b);
            }
        }
    }

    #[test]
    fn wide_blocks_round_trip() {
        let mut x = 0x2545_F491_4F6C_DD1Du64;
        for _ in 0..5000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let b = x & super::super::bits::low_mask(63);
            let code = encode_block(b, 63);
            assert_eq!(decode_walk(code.class, code.offset, 63), b);
        }
    }
}
