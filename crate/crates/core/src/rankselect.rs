//! Plain fully indexable dictionary: a characteristic bit vector with a
//! two-level rank directory and sampled select hints.
//!
//! The directory is one bit string laid out as
//! `[data | super ranks | block ranks | select-1 hints | select-0 hints]`.
//! Every offset in it follows from the bit length and the number of ones, so
//! a directory can be read in place from any bit position of a larger
//! payload through [`RsView`].

use crate::bitcore::bits::{bits_for, ceil_lg, read_bits, BitVector, Bits, WORD_BITS};
use crate::bitcore::broadword::select_in_word_unchecked;
use crate::error::{out_of_range, Error, Result};
use crate::parts::{Parts, PartsReader, Persist};

/// Select hint spacing (one sample per this many ones or zeros).
pub const SELECT_SAMPLE: u64 = 8192;

/// Rank and select over a bit string of `universe()` bits.
///
/// The `*_unchecked` methods assume valid arguments; the provided checked
/// methods validate and report [`Error::OutOfRange`].
pub trait Fid {
    fn universe(&self) -> u64;
    fn ones(&self) -> u64;
    /// Ones strictly before position `i`, `i ≤ universe()`.
    fn rank1_unchecked(&self, i: u64) -> u64;
    /// Position of the `j`-th one, `1 ≤ j ≤ ones()`.
    fn select1_unchecked(&self, j: u64) -> u64;
    /// Position of the `j`-th zero, `1 ≤ j ≤ zeros()`.
    fn select0_unchecked(&self, j: u64) -> u64;

    fn get_unchecked(&self, i: u64) -> bool {
        self.rank1_unchecked(i + 1) > self.rank1_unchecked(i)
    }

    fn zeros(&self) -> u64 {
        self.universe() - self.ones()
    }

    fn rank0_unchecked(&self, i: u64) -> u64 {
        i - self.rank1_unchecked(i)
    }

    fn rank1(&self, i: u64) -> Result<u64> {
        if i > self.universe() {
            return out_of_range("rank position", i, format!("0..={}", self.universe()));
        }
        Ok(self.rank1_unchecked(i))
    }

    fn rank0(&self, i: u64) -> Result<u64> {
        Ok(i - self.rank1(i)?)
    }

    fn rank_bit(&self, b: bool, i: u64) -> Result<u64> {
        if b {
            self.rank1(i)
        } else {
            self.rank0(i)
        }
    }

    fn select1(&self, j: u64) -> Result<u64> {
        if j == 0 || j > self.ones() {
            return out_of_range("select-1 rank", j, format!("1..={}", self.ones()));
        }
        Ok(self.select1_unchecked(j))
    }

    fn select0(&self, j: u64) -> Result<u64> {
        if j == 0 || j > self.zeros() {
            return out_of_range("select-0 rank", j, format!("1..={}", self.zeros()));
        }
        Ok(self.select0_unchecked(j))
    }

    fn select_bit(&self, b: bool, j: u64) -> Result<u64> {
        if b {
            self.select1(j)
        } else {
            self.select0(j)
        }
    }

    fn access(&self, i: u64) -> Result<bool> {
        if i >= self.universe() {
            return out_of_range("position", i, format!("0..{}", self.universe()));
        }
        Ok(self.get_unchecked(i))
    }

    /// Set-level rank: −1 if `x` is not a member, else the number of smaller
    /// members.
    fn set_rank(&self, x: u64) -> Result<i64> {
        if self.access(x)? {
            Ok(self.rank1_unchecked(x) as i64)
        } else {
            Ok(-1)
        }
    }
}

/// Validates a strictly increasing element list inside `[0, m)`.
pub fn check_set(elements: &[u64], m: u64) -> Result<()> {
    for (i, &x) in elements.iter().enumerate() {
        if x >= m {
            return Err(Error::InvalidInput(format!(
                "element {x} outside universe {m}"
            )));
        }
        if i > 0 && elements[i - 1] >= x {
            return Err(Error::InvalidInput(format!(
                "elements not strictly increasing at index {i} ({} then {x})",
                elements[i - 1]
            )));
        }
    }
    Ok(())
}

/// Offsets of the directory components, derived from `(len, ones)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RsLayout {
    pub len: u64,
    pub ones: u64,
    pub sb: u64,
    pub num_super: u64,
    pub num_blocks: u64,
    pub super_width: u32,
    pub block_width: u32,
    pub hint_width: u32,
    pub hints1: u64,
    pub hints0: u64,
    pub super_off: u64,
    pub block_off: u64,
    pub hint1_off: u64,
    pub hint0_off: u64,
    pub total: u64,
}

impl RsLayout {
    pub fn new(len: u64, ones: u64) -> Self {
        debug_assert!(ones <= len);
        let half_lg = (ceil_lg(len) as u64).div_ceil(2).max(1);
        let sb = WORD_BITS as u64 * half_lg;
        let num_super = len.div_ceil(sb);
        let num_blocks = len.div_ceil(WORD_BITS as u64);
        let blocks_per_super = sb / WORD_BITS as u64;
        let super_width = bits_for(ones);
        let block_width = bits_for(sb - WORD_BITS as u64);
        let hint_width = bits_for(num_super.saturating_sub(1));
        let hints = |count: u64| count.saturating_sub(1) / SELECT_SAMPLE;
        let hints1 = hints(ones);
        let hints0 = hints(len - ones);
        let stored_supers = num_super.saturating_sub(1);
        let stored_blocks = num_blocks - num_super;
        debug_assert_eq!(num_super, num_blocks.div_ceil(blocks_per_super));
        let super_off = len;
        let block_off = super_off + stored_supers * super_width as u64;
        let hint1_off = block_off + stored_blocks * block_width as u64;
        let hint0_off = hint1_off + hints1 * hint_width as u64;
        let total = hint0_off + hints0 * hint_width as u64;
        Self {
            len,
            ones,
            sb,
            num_super,
            num_blocks,
            super_width,
            block_width,
            hint_width,
            hints1,
            hints0,
            super_off,
            block_off,
            hint1_off,
            hint0_off,
            total,
        }
    }

    pub fn directory_bits(&self) -> u64 {
        self.total - self.len
    }

    #[inline]
    fn blocks_per_super(&self) -> u64 {
        self.sb / WORD_BITS as u64
    }

    #[inline]
    fn block_slot(&self, b: u64) -> u64 {
        // Block b is stored unless it opens a superblock.
        let bps = self.blocks_per_super();
        b - (b / bps) - 1
    }
}

/// Builds the full directory bit string (data included) for `data`.
pub fn build_directory(data: &BitVector) -> BitVector {
    let len = data.len() as u64;
    let ones = data.count_ones() as u64;
    let lay = RsLayout::new(len, ones);
    let mut out = BitVector::with_capacity(lay.total as usize);
    out.append(data);
    let words = data.words();
    let bps = lay.blocks_per_super();
    let mut super_ranks = Vec::with_capacity(lay.num_super as usize);
    let mut block_ranks = Vec::with_capacity(lay.num_blocks as usize);
    let mut acc = 0u64;
    let mut in_super = 0u64;
    for b in 0..lay.num_blocks {
        if b % bps == 0 {
            super_ranks.push(acc);
            in_super = 0;
        }
        block_ranks.push(in_super);
        let c = words[b as usize].count_ones() as u64;
        acc += c;
        in_super += c;
    }
    for &r in super_ranks.iter().skip(1) {
        out.push_bits(r, lay.super_width);
    }
    for (b, &r) in block_ranks.iter().enumerate() {
        if b as u64 % bps != 0 {
            out.push_bits(r, lay.block_width);
        }
    }
    for (count, want_ones) in [(lay.hints1, true), (lay.hints0, false)] {
        // Hint k names the superblock holding the (k·SR + 1)-th target bit.
        let mut s = 0usize;
        for k in 1..=count {
            let j = k * SELECT_SAMPLE + 1;
            let before = |s: usize| {
                let r1 = super_ranks[s];
                if want_ones {
                    r1
                } else {
                    s as u64 * lay.sb - r1
                }
            };
            while s + 1 < super_ranks.len() && before(s + 1) < j {
                s += 1;
            }
            out.push_bits(s as u64, lay.hint_width);
        }
    }
    debug_assert_eq!(out.len() as u64, lay.total);
    out
}

/// Borrowed directory over a bit window.
#[derive(Clone, Copy, Debug)]
pub struct RsView<'a> {
    words: &'a [u64],
    start: usize,
    lay: RsLayout,
}

impl<'a> RsView<'a> {
    /// `bits` must hold at least `RsLayout::new(len, ones).total` bits.
    pub fn new(bits: Bits<'a>, len: u64, ones: u64) -> Self {
        let lay = RsLayout::new(len, ones);
        debug_assert!(bits.len() as u64 >= lay.total);
        let (words, start) = bits.raw_parts();
        Self { words, start, lay }
    }

    pub fn layout(&self) -> &RsLayout {
        &self.lay
    }

    #[inline]
    fn read(&self, pos: u64, width: u32) -> u64 {
        read_bits(self.words, self.start + pos as usize, width)
    }

    #[inline]
    fn data_word(&self, b: u64) -> u64 {
        let pos = b * WORD_BITS as u64;
        let width = (self.lay.len - pos).min(WORD_BITS as u64) as u32;
        self.read(pos, width)
    }

    #[inline]
    fn super_rank(&self, s: u64) -> u64 {
        if s == 0 {
            0
        } else {
            self.read(
                self.lay.super_off + (s - 1) * self.lay.super_width as u64,
                self.lay.super_width,
            )
        }
    }

    #[inline]
    fn block_rank(&self, b: u64) -> u64 {
        if b % self.lay.blocks_per_super() == 0 {
            0
        } else {
            self.read(
                self.lay.block_off + self.lay.block_slot(b) * self.lay.block_width as u64,
                self.lay.block_width,
            )
        }
    }

    #[inline]
    fn super_rank_bit(&self, s: u64, one: bool) -> u64 {
        let r = self.super_rank(s);
        if one {
            r
        } else {
            s * self.lay.sb - r
        }
    }

    fn hint(&self, one: bool, k: u64) -> u64 {
        if k == 0 {
            return 0;
        }
        let off = if one {
            self.lay.hint1_off
        } else {
            self.lay.hint0_off
        };
        self.read(
            off + (k - 1) * self.lay.hint_width as u64,
            self.lay.hint_width,
        )
    }

    fn select(&self, one: bool, j: u64) -> u64 {
        let count = if one {
            self.lay.hints1
        } else {
            self.lay.hints0
        };
        let k = (j - 1) / SELECT_SAMPLE;
        let mut lo = self.hint(one, k);
        let mut hi = if k < count {
            self.hint(one, k + 1)
        } else {
            self.lay.num_super - 1
        };
        // Largest superblock s in [lo, hi] whose preceding count is < j.
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.super_rank_bit(mid, one) < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let s = lo;
        let mut rem = j - self.super_rank_bit(s, one);
        let bps = self.lay.blocks_per_super();
        let first = s * bps;
        let last = ((s + 1) * bps).min(self.lay.num_blocks) - 1;
        let mut b = first;
        while b < last {
            let r1 = self.block_rank(b + 1);
            let before = if one {
                r1
            } else {
                (b + 1 - first) * WORD_BITS as u64 - r1
            };
            if before >= rem {
                break;
            }
            b += 1;
        }
        let r1 = self.block_rank(b);
        rem -= if one {
            r1
        } else {
            (b - first) * WORD_BITS as u64 - r1
        };
        let mut w = self.data_word(b);
        if !one {
            w = !w;
        }
        b * WORD_BITS as u64 + select_in_word_unchecked(w, (rem - 1) as u32) as u64
    }
}

impl Fid for RsView<'_> {
    #[inline]
    fn universe(&self) -> u64 {
        self.lay.len
    }

    #[inline]
    fn ones(&self) -> u64 {
        self.lay.ones
    }

    #[inline]
    fn rank1_unchecked(&self, i: u64) -> u64 {
        if i >= self.lay.len {
            return self.lay.ones;
        }
        let b = i / WORD_BITS as u64;
        let s = i / self.lay.sb;
        let within =
            self.data_word(b) & crate::bitcore::bits::low_mask((i % WORD_BITS as u64) as u32);
        self.super_rank(s) + self.block_rank(b) + within.count_ones() as u64
    }

    #[inline]
    fn get_unchecked(&self, i: u64) -> bool {
        self.read(i, 1) == 1
    }

    fn select1_unchecked(&self, j: u64) -> u64 {
        self.select(true, j)
    }

    fn select0_unchecked(&self, j: u64) -> u64 {
        self.select(false, j)
    }
}

/// Owned plain FID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsDirectory {
    raw: BitVector,
    lay: RsLayout,
}

impl RsDirectory {
    pub fn from_bitvector(data: &BitVector) -> Self {
        let raw = build_directory(data);
        let lay = RsLayout::new(data.len() as u64, data.count_ones() as u64);
        Self { raw, lay }
    }

    /// Plain FID for the set `elements ⊆ [m]`.
    pub fn build(elements: &[u64], m: u64) -> Result<Self> {
        check_set(elements, m)?;
        let len = usize::try_from(m)
            .map_err(|_| Error::InvalidInput(format!("universe {m} too large for a bit vector")))?;
        Ok(Self::from_bitvector(&BitVector::from_positions(
            elements, len,
        )))
    }

    pub fn view(&self) -> RsView<'_> {
        RsView {
            words: self.raw.words(),
            start: 0,
            lay: self.lay,
        }
    }

    pub fn layout(&self) -> &RsLayout {
        &self.lay
    }

    /// The full directory bit string, data first.
    pub fn raw(&self) -> &BitVector {
        &self.raw
    }

    pub fn total_bits(&self) -> u64 {
        self.lay.total
    }

    pub fn data_bits(&self) -> u64 {
        self.lay.len
    }

    pub fn directory_bits(&self) -> u64 {
        self.lay.directory_bits()
    }

    /// Rebuilds from a raw directory string, verifying it is well-formed.
    pub fn from_raw(raw: BitVector, len: u64, ones: u64) -> Result<Self> {
        if ones > len {
            return Err(Error::Corrupt("more ones than bits".into()));
        }
        let lay = RsLayout::new(len, ones);
        if raw.len() as u64 != lay.total {
            return Err(Error::Corrupt(format!(
                "directory has {} bits, expected {}",
                raw.len(),
                lay.total
            )));
        }
        let data = raw.view().sub(0, len as usize).to_bitvector();
        let rebuilt = build_directory(&data);
        if rebuilt != raw {
            return Err(Error::Corrupt(
                "rank/select directory inconsistent with data".into(),
            ));
        }
        Ok(Self { raw, lay })
    }

    /// Directory overhead constants: the overhead is at most
    /// `ALPHA·m·lglg m/lg m + GAMMA` bits for every `m ≤ 2^64`.
    pub const ALPHA: f64 = 3.0;
    pub const GAMMA: f64 = 256.0;

    pub fn overhead_bound(m: u64) -> f64 {
        let mf = m.max(4) as f64;
        let lg = mf.log2();
        Self::ALPHA * mf * lg.log2() / lg + Self::GAMMA
    }
}

impl Fid for RsDirectory {
    fn universe(&self) -> u64 {
        self.lay.len
    }
    fn ones(&self) -> u64 {
        self.lay.ones
    }
    #[inline]
    fn rank1_unchecked(&self, i: u64) -> u64 {
        self.view().rank1_unchecked(i)
    }
    #[inline]
    fn get_unchecked(&self, i: u64) -> bool {
        self.raw.get(i as usize)
    }
    fn select1_unchecked(&self, j: u64) -> u64 {
        self.view().select1_unchecked(j)
    }
    fn select0_unchecked(&self, j: u64) -> u64 {
        self.view().select0_unchecked(j)
    }
}

impl RsDirectory {
    /// Writes the data and directory sections without the shape fields.
    pub fn write_sections(&self, parts: &mut Parts, prefix: &str) {
        let data = self.raw.view().sub(0, self.lay.len as usize).to_bitvector();
        let dir = self
            .raw
            .view()
            .sub(self.lay.len as usize, self.lay.directory_bits() as usize)
            .to_bitvector();
        parts.section(prefix, "bits", data);
        parts.section(prefix, "directory", dir);
    }

    pub fn read_sections(r: &mut PartsReader<'_>, len: u64, ones: u64) -> Result<Self> {
        if ones > len {
            return Err(Error::Corrupt("more ones than bits".into()));
        }
        let lay = RsLayout::new(len, ones);
        let data = r.section_len(len)?;
        let dir = r.section_len(lay.directory_bits())?;
        let mut raw = data.clone();
        raw.append(dir);
        Self::from_raw(raw, len, ones)
    }
}

impl Persist for RsDirectory {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "len", self.lay.len);
        parts.field(prefix, "ones", self.lay.ones);
        self.write_sections(parts, prefix);
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let len = r.field()?;
        let ones = r.field()?;
        Self::read_sections(r, len, ones)
    }

    fn size_bits(&self) -> u64 {
        self.lay.total
    }
}
