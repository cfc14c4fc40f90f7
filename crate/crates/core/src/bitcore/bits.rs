//! Packed bit vectors, fixed-width integer arrays and sequential bit I/O.
//!
//! Bits are stored least-significant-bit first: bit `i` lives in word
//! `i / 64` at in-word position `i % 64`. Every structure in the crate is
//! ultimately a concatenation of such bit strings, so the helpers here also
//! support unaligned reads from an arbitrary bit offset.

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

/// Number of bits needed to write any value in `0..=x`.
#[inline]
pub fn bits_for(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// `⌈lg x⌉` for `x ≥ 1`; zero for `x ≤ 1`.
#[inline]
pub fn ceil_lg(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `⌊lg x⌋` for `x ≥ 1`; zero for `x = 0`.
#[inline]
pub fn floor_lg(x: u64) -> u32 {
    if x == 0 {
        0
    } else {
        63 - x.leading_zeros()
    }
}

#[inline]
pub fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Reads `width ≤ 64` bits starting at bit `pos`. Words past the end of the
/// slice read as zero.
#[inline]
pub fn read_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / WORD_BITS;
    let off = (pos % WORD_BITS) as u32;
    let lo = words.get(w).copied().unwrap_or(0) >> off;
    let value = if off + width > 64 {
        let hi = words.get(w + 1).copied().unwrap_or(0);
        lo | (hi << (64 - off))
    } else {
        lo
    };
    value & low_mask(width)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    /// Characteristic vector of `positions` over `[0, len)`.
    pub fn from_positions(positions: &[u64], len: usize) -> Self {
        let mut bv = Self::zeros(len);
        for &p in positions {
            bv.set(p as usize, true);
        }
        bv
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bv = Self::new();
        for b in bits {
            bv.push(b);
        }
        bv
    }

    /// Parses a string of `'0'`/`'1'` characters, bit 0 first.
    pub fn from_str_bits(s: &str) -> Self {
        Self::from_bools(s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1'))
    }

    /// Rebuilds a vector from raw words; bits at or above `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != len.div_ceil(WORD_BITS) {
            return Err(Error::Corrupt(format!(
                "bit vector of {len} bits cannot use {} words",
                words.len()
            )));
        }
        if len % WORD_BITS != 0 {
            let last = words.len() - 1;
            words[last] &= low_mask((len % WORD_BITS) as u32);
        }
        Ok(Self { words, len })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn push(&mut self, value: bool) {
        if self.len % WORD_BITS == 0 {
            self.words.push(0);
        }
        if value {
            self.words[self.len / WORD_BITS] |= 1u64 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(
            width == 64 || value >> width == 0,
            "value {value} wider than {width}"
        );
        if width == 0 {
            return;
        }
        let value = value & low_mask(width);
        let off = (self.len % WORD_BITS) as u32;
        if off == 0 {
            self.words.push(value);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= value << off;
            if off + width > 64 {
                self.words.push(value >> (64 - off));
            }
        }
        self.len += width as usize;
    }

    pub fn push_zeros(&mut self, count: usize) {
        let new_len = self.len + count;
        self.words.resize(new_len.div_ceil(WORD_BITS), 0);
        self.len = new_len;
    }

    #[inline]
    pub fn get_bits(&self, pos: usize, width: u32) -> u64 {
        debug_assert!(pos + width as usize <= self.len);
        read_bits(&self.words, pos, width)
    }

    pub fn set_bits(&mut self, pos: usize, width: u32, value: u64) {
        assert!(pos + width as usize <= self.len);
        if width == 0 {
            return;
        }
        let value = value & low_mask(width);
        let w = pos / WORD_BITS;
        let off = (pos % WORD_BITS) as u32;
        let mask = low_mask(width);
        self.words[w] = (self.words[w] & !(mask << off)) | (value << off);
        if off + width > 64 {
            let spill = off + width - 64;
            let hi_mask = low_mask(spill);
            self.words[w + 1] = (self.words[w + 1] & !hi_mask) | (value >> (64 - off));
        }
    }

    /// Appends `len` bits of `src` starting at `start`.
    pub fn append_range(&mut self, src: &[u64], start: usize, len: usize) {
        let mut done = 0;
        while done < len {
            let take = (len - done).min(64) as u32;
            self.push_bits(read_bits(src, start + done, take), take);
            done += take as usize;
        }
    }

    pub fn append(&mut self, other: &BitVector) {
        self.append_range(&other.words, 0, other.len);
    }

    /// Overwrites the bits at `pos..pos + src.len()` with `src`.
    pub fn write_at(&mut self, pos: usize, src: &BitVector) {
        let mut done = 0;
        while done < src.len {
            let take = (src.len - done).min(64) as u32;
            self.set_bits(pos + done, take, src.get_bits(done, take));
            done += take as usize;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Bit-by-bit complement over `[0, len)`.
    pub fn complement(&self) -> BitVector {
        let words = self.words.iter().map(|w| !w).collect();
        BitVector::from_words(words, self.len).expect("same shape")
    }

    pub fn view(&self) -> Bits<'_> {
        Bits {
            words: &self.words,
            start: 0,
            len: self.len,
        }
    }

    /// Packs the bits into little-endian bytes, final byte zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(self.len.div_ceil(8));
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Corrupt(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; len.div_ceil(WORD_BITS)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        if len % 8 != 0 {
            let pad = bytes[bytes.len() - 1] >> (len % 8);
            if pad != 0 {
                return Err(Error::Corrupt("nonzero padding bits".into()));
            }
        }
        Self::from_words(words, len)
    }
}

/// Borrowed window `[start, start + len)` into a word slice.
#[derive(Clone, Copy, Debug)]
pub struct Bits<'a> {
    words: &'a [u64],
    start: usize,
    len: usize,
}

impl<'a> Bits<'a> {
    pub fn new(words: &'a [u64], start: usize, len: usize) -> Self {
        Self { words, start, len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        read_bits(self.words, self.start + i, 1) == 1
    }

    #[inline]
    pub fn get_bits(&self, pos: usize, width: u32) -> u64 {
        debug_assert!(
            pos + width as usize <= self.len,
            "{pos}+{width} > {}",
            self.len
        );
        read_bits(self.words, self.start + pos, width)
    }

    /// The `i`-th 64-bit chunk of the window, zero-filled past the end.
    #[inline]
    pub fn chunk(&self, i: usize) -> u64 {
        let pos = i * WORD_BITS;
        if pos >= self.len {
            return 0;
        }
        let width = (self.len - pos).min(WORD_BITS) as u32;
        read_bits(self.words, self.start + pos, width)
    }

    #[inline]
    pub fn num_chunks(&self) -> usize {
        self.len.div_ceil(WORD_BITS)
    }

    /// Underlying words and the bit offset of the window start.
    pub fn raw_parts(&self) -> (&'a [u64], usize) {
        (self.words, self.start)
    }

    pub fn sub(&self, pos: usize, len: usize) -> Bits<'a> {
        debug_assert!(pos + len <= self.len);
        Bits {
            words: self.words,
            start: self.start + pos,
            len,
        }
    }

    pub fn to_bitvector(&self) -> BitVector {
        let mut bv = BitVector::with_capacity(self.len);
        bv.append_range(self.words, self.start, self.len);
        bv
    }
}

/// Sequential reader over a bit vector.
pub struct BitReader<'a> {
    bits: &'a BitVector,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitVector) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read(&mut self, width: u32) -> Result<u64> {
        if self.pos + width as usize > self.bits.len() {
            return Err(Error::Corrupt(format!(
                "read of {width} bits at {} overruns section of {} bits",
                self.pos,
                self.bits.len()
            )));
        }
        let v = self.bits.get_bits(self.pos, width);
        self.pos += width as usize;
        Ok(v)
    }

    pub fn read_bitvector(&mut self, len: usize) -> Result<BitVector> {
        if self.pos + len > self.bits.len() {
            return Err(Error::Corrupt(format!(
                "read of {len} bits at {} overruns section of {} bits",
                self.pos,
                self.bits.len()
            )));
        }
        let mut out = BitVector::with_capacity(len);
        out.append_range(self.bits.words(), self.pos, len);
        self.pos += len;
        Ok(out)
    }

    pub fn read_ints(&mut self, len: usize, width: u32) -> Result<IntVector> {
        let bits = self.read_bitvector(len * width as usize)?;
        Ok(IntVector { bits, width, len })
    }

    /// Elias-gamma coded value `v ≥ 0` (stored as `v + 1`).
    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while self.read(1)? == 0 {
            zeros += 1;
            if zeros > 64 {
                return Err(Error::Corrupt("gamma code too long".into()));
            }
        }
        let rest = self.read(zeros)?;
        let v = if zeros == 64 {
            rest
        } else {
            (1u64 << zeros) | rest
        };
        Ok(v - 1)
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.bits.len() {
            return Err(Error::Corrupt(format!(
                "{} trailing bits in section",
                self.bits.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Appends the Elias-gamma code of `v + 1`.
pub fn push_gamma(out: &mut BitVector, v: u64) {
    let x = v + 1;
    let n = floor_lg(x);
    out.push_zeros(n as usize);
    out.push(true);
    out.push_bits(x & low_mask(n), n);
}

pub fn gamma_len(v: u64) -> usize {
    2 * floor_lg(v + 1) as usize + 1
}

/// Fixed-width packed integer array.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntVector {
    bits: BitVector,
    width: u32,
    len: usize,
}

impl IntVector {
    pub fn new(width: u32) -> Self {
        Self {
            bits: BitVector::new(),
            width,
            len: 0,
        }
    }

    pub fn with_len(len: usize, width: u32) -> Self {
        Self {
            bits: BitVector::zeros(len * width as usize),
            width,
            len,
        }
    }

    /// Packs `values` using the narrowest width that holds `max(values)`.
    pub fn from_slice(values: &[u64]) -> Self {
        let width = bits_for(values.iter().copied().max().unwrap_or(0));
        Self::from_slice_width(values, width)
    }

    pub fn from_slice_width(values: &[u64], width: u32) -> Self {
        let mut iv = Self::new(width);
        for &v in values {
            iv.push(v);
        }
        iv
    }

    #[inline]
    pub fn push(&mut self, value: u64) {
        self.bits.push_bits(value, self.width);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.bits.get_bits(i * self.width as usize, self.width)
    }

    pub fn set(&mut self, i: usize, value: u64) {
        self.bits
            .set_bits(i * self.width as usize, self.width, value);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn size_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}
