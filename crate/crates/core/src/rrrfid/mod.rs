//! Compressed fully indexable dictionary.
//!
//! The universe is cut into `p = ⌈m/u⌉` blocks of `u` bits. Each block is
//! stored as its class (popcount, array A) plus its enumerative offset; the
//! offsets are concatenated with variable widths. Every `K` blocks a sample
//! records the rank and the offset-stream position. Select runs through a
//! [`SelectApparatus`] for the set and another for its complement.

mod apparatus;
pub mod monotone;

pub use apparatus::SelectApparatus;

use crate::bitcore::bits::{bits_for, floor_lg, low_mask, BitReader, BitVector};
use crate::bitcore::enumerative::{
    binomials, decode_table, decode_walk, encode_block, offset_width, DecodeTable, MAX_TABLE_U,
    MAX_U,
};
use crate::bitcore::info_bound;
use crate::error::{Error, Result};
use crate::parts::{Parts, PartsReader, Persist};
use crate::rankselect::{check_set, Fid};

/// Blocks between rank/offset samples.
pub const SAMPLE_BLOCKS: u64 = 128;
pub const MAX_DEFAULT_U: u32 = 15;

/// `min(⌊½ lg m⌋, 15)`, at least 1.
pub fn default_block_width(m: u64) -> u32 {
    (floor_lg(m) / 2).clamp(1, MAX_DEFAULT_U)
}

#[derive(Clone, Debug)]
pub struct RrrFid {
    m: u64,
    n: u64,
    u: u32,
    p: u64,
    last_len: u32,
    cw: u32,
    classes: BitVector,
    offsets: BitVector,
    /// Rank and offset pointer per sample, interleaved so both share a line.
    samples: BitVector,
    rank_width: u32,
    ptr_width: u32,
    sel1: SelectApparatus,
    sel0: SelectApparatus,
    widths: Vec<u8>,
    /// Mean offset width per block in 1/65536 bits.
    mean_width_q16: u64,
    pair_widths: Vec<u8>,
    table: Option<&'static DecodeTable>,
}

impl PartialEq for RrrFid {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.n == other.n
            && self.u == other.u
            && self.classes == other.classes
            && self.offsets == other.offsets
    }
}

impl Eq for RrrFid {}

impl RrrFid {
    /// Compressed FID for `elements ⊆ [m]` with the default block width.
    pub fn build(elements: &[u64], m: u64) -> Result<Self> {
        Self::build_with(elements, m, default_block_width(m))
    }

    pub fn build_with(elements: &[u64], m: u64, u: u32) -> Result<Self> {
        check_set(elements, m)?;
        if u == 0 || u as usize > MAX_U {
            return Err(Error::InvalidInput(format!(
                "block width {u} not in 1..={MAX_U}"
            )));
        }
        let p = m.div_ceil(u as u64);
        let mut blocks = vec![0u64; p as usize];
        for &x in elements {
            blocks[(x / u as u64) as usize] |= 1 << (x % u as u64);
        }
        Ok(Self::from_blocks(m, u, blocks))
    }

    /// Builds from a characteristic bit vector.
    pub fn from_bitvector(bits: &BitVector, u: u32) -> Result<Self> {
        if u == 0 || u as usize > MAX_U {
            return Err(Error::InvalidInput(format!(
                "block width {u} not in 1..={MAX_U}"
            )));
        }
        let m = bits.len() as u64;
        let p = m.div_ceil(u as u64);
        let blocks = (0..p)
            .map(|b| {
                let start = b * u as u64;
                let w = (m - start).min(u as u64) as u32;
                bits.get_bits(start as usize, w)
            })
            .collect();
        Ok(Self::from_blocks(m, u, blocks))
    }

    fn from_blocks(m: u64, u: u32, blocks: Vec<u64>) -> Self {
        let p = blocks.len() as u64;
        let cw = bits_for(u as u64);
        let mut classes = BitVector::with_capacity((p * cw as u64) as usize);
        let mut offsets = BitVector::new();
        let mut counts = Vec::with_capacity(blocks.len());
        let mut n = 0u64;
        let mut samples = Vec::new();
        let last_len = if p == 0 {
            0
        } else {
            (m - (p - 1) * u as u64) as u32
        };
        for (b, &w) in blocks.iter().enumerate() {
            if b > 0 && b as u64 % SAMPLE_BLOCKS == 0 {
                samples.push((n, offsets.len() as u64));
            }
            // The final block is coded at its true length.
            let code = encode_block(w, if b as u64 + 1 == p { last_len } else { u });
            classes.push_bits(code.class as u64, cw);
            offsets.push_bits(code.offset, code.width_bits);
            counts.push(code.class);
            n += code.class as u64;
        }
        let rank_width = bits_for(n);
        let ptr_width = bits_for(offsets.len() as u64);
        let mut samp = BitVector::with_capacity(samples.len() * (rank_width + ptr_width) as usize);
        for (r, ptr) in samples {
            samp.push_bits(r, rank_width);
            samp.push_bits(ptr, ptr_width);
        }
        let block_len = |b: u64| if b + 1 == p { last_len } else { u };
        let sel1 = SelectApparatus::build(
            true,
            p,
            u,
            n,
            |b| counts[b as usize],
            |b| blocks[b as usize],
        );
        let sel0 = SelectApparatus::build(
            false,
            p,
            u,
            m - n,
            |b| block_len(b) - counts[b as usize],
            |b| !blocks[b as usize] & low_mask(block_len(b)),
        );
        let mut fid = Self {
            m,
            n,
            u,
            p,
            last_len,
            cw,
            classes,
            offsets,
            samples: samp,
            rank_width,
            ptr_width,
            sel1,
            sel0,
            widths: Vec::new(),
            mean_width_q16: 0,
            pair_widths: Vec::new(),
            table: None,
        };
        fid.init_tables();
        fid
    }

    fn init_tables(&mut self) {
        self.widths = (0..=self.u)
            .map(|c| offset_width(self.u, c) as u8)
            .collect();
        self.mean_width_q16 = if self.p == 0 {
            0
        } else {
            ((self.offsets.len() as u128) << 16) as u64 / self.p
        };
        if self.cw == 4 {
            self.pair_widths = (0..256u32)
                .map(|b| {
                    let w = |c: u32| {
                        if c <= self.u {
                            self.widths[c as usize]
                        } else {
                            0
                        }
                    };
                    w(b & 15) + w(b >> 4)
                })
                .collect();
        }
        self.table = (self.u <= MAX_TABLE_U).then(|| decode_table(self.u));
    }

    pub fn block_width(&self) -> u32 {
        self.u
    }

    pub fn num_blocks(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn class(&self, b: u64) -> u32 {
        self.classes
            .get_bits((b * self.cw as u64) as usize, self.cw) as u32
    }

    pub fn class_stream(&self) -> Vec<u32> {
        (0..self.p).map(|b| self.class(b)).collect()
    }

    pub fn offset_stream_bits(&self) -> u64 {
        self.offsets.len() as u64
    }

    /// Ones before block `b` and the offset-stream position of block `b`.
    #[inline]
    pub(crate) fn prefix_at_block(&self, b: u64) -> (u64, u64) {
        let s = b / SAMPLE_BLOCKS;
        let (mut ones, mut ptr) = if s == 0 {
            (0, 0)
        } else {
            let at = (s as usize - 1) * (self.rank_width + self.ptr_width) as usize;
            (
                self.samples.get_bits(at, self.rank_width),
                self.samples
                    .get_bits(at + self.rank_width as usize, self.ptr_width),
            )
        };
        let mut j = s * SAMPLE_BLOCKS;
        let est = ptr + (((b - j) * self.mean_width_q16) >> 16);
        prefetch_bits(
            self.offsets.words(),
            est.saturating_sub(PREFETCH_SLACK),
            est + PREFETCH_SLACK + self.u as u64,
        );
        if self.cw == 4 {
            while j + 16 <= b {
                let w = self.classes.get_bits((j * 4) as usize, 64);
                ones += nibble_sum(w);
                ptr += self.pair_width_sum(w);
                j += 16;
            }
            if j < b {
                let w = self
                    .classes
                    .get_bits((j * 4) as usize, ((b - j) * 4) as u32);
                ones += nibble_sum(w);
                ptr += self.pair_width_sum(w);
            }
        } else {
            while j < b {
                let c = self.class(j);
                ones += c as u64;
                ptr += self.widths[c as usize] as u64;
                j += 1;
            }
        }
        (ones, ptr)
    }

    #[inline]
    fn pair_width_sum(&self, w: u64) -> u64 {
        let mut sum = 0u64;
        let mut w = w;
        while w != 0 {
            sum += self.pair_widths[(w & 0xFF) as usize] as u64;
            w >>= 8;
        }
        sum
    }

    /// The `u` bits of block `b` given its class and offset position.
    #[inline]
    pub(crate) fn block_bits(&self, b: u64, ptr: u64) -> u64 {
        let c = self.class(b);
        if b + 1 == self.p && self.last_len != self.u {
            let off = self
                .offsets
                .get_bits(ptr as usize, offset_width(self.last_len, c));
            return decode_walk(c, off, self.last_len);
        }
        let width = self.widths[c as usize] as u32;
        let off = self.offsets.get_bits(ptr as usize, width);
        match self.table {
            Some(t) => t.decode(c, off),
            None => decode_walk(c, off, self.u),
        }
    }

    /// Decodes the whole set.
    pub fn to_elements(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut ptr = 0u64;
        for b in 0..self.p {
            let c = self.class(b);
            let bits = self.block_bits(b, ptr);
            ptr += self.widths[c as usize] as u64;
            let mut w = bits;
            while w != 0 {
                out.push(b * self.u as u64 + w.trailing_zeros() as u64);
                w &= w - 1;
            }
        }
        out
    }

    pub fn select_apparatus(&self, ones: bool) -> &SelectApparatus {
        if ones {
            &self.sel1
        } else {
            &self.sel0
        }
    }

    /// Bit counts per component; they sum to the serialized payload.
    pub fn space_formula(&self) -> Vec<(String, u64)> {
        self.to_parts()
            .sections
            .iter()
            .map(|(name, b)| (name.clone(), b.len() as u64))
            .collect()
    }

    pub fn total_bits(&self) -> u64 {
        self.classes.len() as u64
            + self.offsets.len() as u64
            + self.samples.len() as u64
            + self.sel1.size_bits()
            + self.sel0.size_bits()
    }

    /// `(total − B(n,m)) / (m·lglg m / lg m)`.
    pub fn overhead_ratio(&self) -> f64 {
        let b = info_bound(self.n, self.m).expect("n ≤ m") as f64;
        let mf = self.m as f64;
        let lg = mf.log2();
        (self.total_bits() as f64 - b) / (mf * lg.log2() / lg)
    }
}

/// Bits either side of the estimated offset position that get prefetched.
const PREFETCH_SLACK: u64 = 48;

/// Hints the words holding bits `from` and `to` into cache, so the class
/// scan that pins down the exact offset position overlaps with the fetch.
#[inline]
fn prefetch_bits(words: &[u64], from: u64, to: u64) {
    #[cfg(target_arch = "x86_64")]
    {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        let Some(end) = words.len().checked_sub(1) else {
            return;
        };
        let a = ((from / 64) as usize).min(end);
        let b = ((to / 64) as usize).min(end);
        // SAFETY: a, b < words.len(); prefetching has no side effects.
        unsafe {
            _mm_prefetch(words.as_ptr().add(a) as *const i8, _MM_HINT_T0);
            if b / 8 != a / 8 {
                _mm_prefetch(words.as_ptr().add(b) as *const i8, _MM_HINT_T0);
            }
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = (words, from, to);
}

#[inline]
fn nibble_sum(w: u64) -> u64 {
    let x = (w & 0x0F0F_0F0F_0F0F_0F0F) + ((w >> 4) & 0x0F0F_0F0F_0F0F_0F0F);
    x.wrapping_mul(0x0101_0101_0101_0101) >> 56
}

impl Fid for RrrFid {
    #[inline]
    fn universe(&self) -> u64 {
        self.m
    }

    #[inline]
    fn ones(&self) -> u64 {
        self.n
    }

    #[inline]
    fn rank1_unchecked(&self, x: u64) -> u64 {
        if x >= self.m {
            return self.n;
        }
        let b = x / self.u as u64;
        let (ones, ptr) = self.prefix_at_block(b);
        let bits = self.block_bits(b, ptr);
        ones + (bits & low_mask((x - b * self.u as u64) as u32)).count_ones() as u64
    }

    fn get_unchecked(&self, x: u64) -> bool {
        let b = x / self.u as u64;
        let (_, ptr) = self.prefix_at_block(b);
        (self.block_bits(b, ptr) >> (x - b * self.u as u64)) & 1 == 1
    }

    fn select1_unchecked(&self, j: u64) -> u64 {
        self.sel1.locate(self, j)
    }

    fn select0_unchecked(&self, j: u64) -> u64 {
        self.sel0.locate(self, j)
    }
}

impl Persist for RrrFid {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "u", self.u as u64);
        parts.section(prefix, "classes", self.classes.clone());
        parts.section(prefix, "offsets", self.offsets.clone());
        parts.section(prefix, "samples", self.samples.clone());
        self.sel1
            .write_sections(parts, &crate::parts::join(prefix, "select1"));
        self.sel0
            .write_sections(parts, &crate::parts::join(prefix, "select0"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let m = r.field()?;
        let u = r.field_at_most(MAX_U as u64)? as u32;
        if u == 0 {
            return Err(Error::Corrupt("block width 0".into()));
        }
        let p = m.div_ceil(u as u64);
        let cw = bits_for(u as u64);
        let classes = r.section_len(p * cw as u64)?;
        let offsets = r.section()?;
        let mut cr = BitReader::new(classes);
        let mut or = BitReader::new(offsets);
        let t = binomials();
        let mut blocks = Vec::with_capacity(p as usize);
        for b in 0..p {
            let c = cr.read(cw)? as u32;
            let len = (m - b * u as u64).min(u as u64) as u32;
            if c > len {
                return Err(Error::Corrupt(format!("block {b} has class {c} > {len}")));
            }
            let off = or.read(offset_width(len, c))?;
            if off >= t.get(len as usize, c as usize) {
                return Err(Error::Corrupt(format!("block {b} offset out of range")));
            }
            blocks.push(decode_walk(c, off, len));
        }
        or.finish()?;
        let fid = Self::from_blocks(m, u, blocks);
        let expected = fid.to_parts();
        r.expect_rest(&expected, 2, 2)?;
        Ok(fid)
    }

    fn size_bits(&self) -> u64 {
        self.total_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankselect::RsDirectory;

    fn xorshift(x: &mut u64) -> u64 {
        *x ^= *x << 13;
        *x ^= *x >> 7;
        *x ^= *x << 17;
        *x
    }

    fn compare_with_plain(elements: &[u64], m: u64, u: u32) {
        let fid = RrrFid::build_with(elements, m, u).unwrap();
        let plain = RsDirectory::build(elements, m).unwrap();
        assert_eq!(fid.ones(), plain.ones());
        for x in 0..=m {
            assert_eq!(
                fid.rank1_unchecked(x),
                plain.rank1_unchecked(x),
                "rank1({x}) m={m} u={u}"
            );
        }
        for j in 1..=plain.ones() {
            assert_eq!(
                fid.select1_unchecked(j),
                plain.select1_unchecked(j),
                "select1({j})"
            );
        }
        for j in 1..=plain.zeros() {
            assert_eq!(
                fid.select0_unchecked(j),
                plain.select0_unchecked(j),
                "select0({j})"
            );
        }
        assert_eq!(fid.to_elements(), elements);
    }

    #[test]
    fn spec_examples() {
        let s = [2, 3, 5, 7, 11, 13];
        let fid = RrrFid::build_with(&s, 16, 4).unwrap();
        // Blocks {0..3}, {4..7}, {8..11}, {12..15} hold 2, 2, 1 and 1 elements.
        assert_eq!(fid.class_stream(), vec![2, 2, 1, 1]);
        assert_eq!(fid.rank1(12).unwrap(), 5);
        assert_eq!(fid.select0(1).unwrap(), 0);
        let empty = RrrFid::build(&[], 64).unwrap();
        assert!(empty.class_stream().iter().all(|&c| c == 0));
        assert_eq!(empty.offset_stream_bits(), 0);
        for i in 0..=64 {
            assert_eq!(empty.rank0(i).unwrap(), i);
        }
        let empty3 = RrrFid::build_with(&[], 64, 3).unwrap();
        assert_eq!(empty3.offset_stream_bits(), 0);
        let full: Vec<u64> = (0..100).collect();
        assert_eq!(RrrFid::build(&full, 100).unwrap().offset_stream_bits(), 0);
    }

    #[test]
    fn odd_numbers_offset_bound() {
        let m = 1u64 << 16;
        let odd: Vec<u64> = (0..m).filter(|x| x % 2 == 1).collect();
        let fid = RrrFid::build(&odd, m).unwrap();
        let bound = info_bound(odd.len() as u64, m).unwrap();
        assert!(fid.offset_stream_bits() <= bound + fid.num_blocks());
    }

    #[test]
    fn matches_plain_on_varied_densities() {
        let mut x = 0xDEAD_BEEF_1234_5678u64;
        for (m, u, modulus) in [
            (1u64, 1u32, 2u64),
            (7, 3, 2),
            (100, 4, 3),
            (1000, 5, 2),
            (5000, 15, 7),
            (5000, 8, 1000),
            (20_000, 16, 5),
            (20_000, 20, 3),
            (50_000, 8, 2),
        ] {
            let elements: Vec<u64> = (0..m).filter(|_| xorshift(&mut x) % modulus == 0).collect();
            compare_with_plain(&elements, m, u);
        }
    }

    #[test]
    fn sparse_segments_are_exercised() {
        // Clusters separated by long gaps force sparse segments.
        let mut elements = Vec::new();
        for c in 0..20u64 {
            for i in 0..300 {
                elements.push(c * 200_000 + i * 3);
            }
        }
        let m = 4_000_000;
        let fid = RrrFid::build(&elements, m).unwrap();
        assert!(fid.select_apparatus(true).sparse_segments() > 0);
        for (j, &e) in elements.iter().enumerate() {
            assert_eq!(fid.select1_unchecked(j as u64 + 1), e);
        }
        let plain = RsDirectory::build(&elements, m).unwrap();
        for j in (1..=plain.zeros()).step_by(997) {
            assert_eq!(fid.select0_unchecked(j), plain.select0_unchecked(j));
        }
    }

    #[test]
    fn persist_round_trip() {
        let s: Vec<u64> = (0..3000).map(|i| i * 5 + (i % 3)).collect();
        let fid = RrrFid::build(&s, 16_000).unwrap();
        let parts = fid.to_parts();
        let back = RrrFid::from_parts(&parts).unwrap();
        assert_eq!(back.to_parts(), parts);
        let formula: u64 = fid.space_formula().iter().map(|(_, b)| b).sum();
        assert_eq!(formula, fid.total_bits());
        assert_eq!(formula, parts.section_bits());
        let mut bad = parts.clone();
        let v = bad.sections[2].1.get(0);
        bad.sections[2].1.set(0, !v);
        assert!(RrrFid::from_parts(&bad).is_err());
    }
}
