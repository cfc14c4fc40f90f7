//! Select structure over the blocks of an [`RrrFid`].
//!
//! Target bits (ones for the set, zeros for the complement) are grouped in
//! runs of `v = ⌊(lg p)²⌋`. `C[j]` is the block holding target bit `j·v`, so
//! run `j` lies in blocks `C[j]..=C[j+1]`. A run whose block span exceeds
//! `(lg p)⁴` bits is sparse and keeps its positions explicitly. A dense run
//! is searched by descending a complete tree of branching `⌈√lg p⌉` over its
//! blocks; the tree's node counts are prefix counts of the class array, read
//! from the rank samples rather than stored.

use super::monotone::EliasFano;
use super::RrrFid;
use crate::bitcore::bits::{bits_for, BitVector, IntVector};
use crate::bitcore::broadword::select_in_word_unchecked;
use crate::parts::{join, Parts};
use crate::rankselect::{Fid, RsDirectory};

#[derive(Clone, Debug)]
pub struct SelectApparatus {
    ones: bool,
    count: u64,
    u: u32,
    v: u64,
    dense_span: u64,
    fanout: u64,
    runs: u64,
    c_index: EliasFano,
    kinds: RsDirectory,
    sparse_ptr: IntVector,
    sparse: BitVector,
}

/// `(v, dense span threshold in bits, fanout)` for `p` blocks.
pub fn strides(p: u64) -> (u64, u64, u64) {
    let lg = if p < 2 { 0.0 } else { (p as f64).log2() };
    let v = ((lg * lg).floor() as u64).max(1);
    let dense_span = (lg * lg * lg * lg).floor() as u64;
    let fanout = (lg.sqrt().ceil() as u64).max(2);
    (v, dense_span, fanout)
}

impl SelectApparatus {
    /// `count_of(b)` is the number of target bits in block `b` and
    /// `pattern_of(b)` the block's target bits.
    pub fn build(
        ones: bool,
        p: u64,
        u: u32,
        count: u64,
        count_of: impl Fn(u64) -> u32,
        pattern_of: impl Fn(u64) -> u64,
    ) -> Self {
        let (v, dense_span, fanout) = strides(p);
        let runs = count.div_ceil(v);
        // c[0] = 0; c[j] = block of target bit min(j·v, count).
        let mut c = vec![0u64];
        let mut before_c = vec![0u64];
        let mut acc = 0u64;
        let mut j = 1u64;
        for b in 0..p {
            let after = acc + count_of(b) as u64;
            while j <= runs && (j * v).min(count) <= after {
                c.push(b);
                before_c.push(acc);
                j += 1;
            }
            acc = after;
        }
        debug_assert_eq!(c.len() as u64, runs + 1);
        let mut kinds = BitVector::zeros(runs as usize);
        let mut ptrs = Vec::new();
        let mut sparse = BitVector::new();
        for run in 0..runs {
            let (lo, hi) = (c[run as usize], c[run as usize + 1]);
            let span = (hi - lo + 1) * u as u64;
            if span <= dense_span {
                continue;
            }
            kinds.set(run as usize, true);
            ptrs.push(sparse.len() as u64);
            let width = bits_for(span - 1);
            let first = run * v + 1;
            let last = ((run + 1) * v).min(count);
            let mut seen = before_c[run as usize];
            for b in lo..=hi {
                let mut w = pattern_of(b);
                while w != 0 {
                    seen += 1;
                    let bit = w.trailing_zeros() as u64;
                    w &= w - 1;
                    if seen >= first && seen <= last {
                        sparse.push_bits((b - lo) * u as u64 + bit, width);
                    }
                }
            }
        }
        let ptr_width = bits_for(sparse.len() as u64);
        let sparse_ptr = IntVector::from_slice_width(&ptrs, ptr_width);
        Self {
            ones,
            count,
            u,
            v,
            dense_span,
            fanout,
            runs,
            c_index: EliasFano::new(&c[1..], p.max(1)),
            kinds: RsDirectory::from_bitvector(&kinds),
            sparse_ptr,
            sparse,
        }
    }

    pub fn sparse_segments(&self) -> u64 {
        self.kinds.ones()
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn stride(&self) -> u64 {
        self.v
    }

    #[inline]
    fn c(&self, j: u64) -> u64 {
        if j == 0 {
            0
        } else {
            self.c_index.get(j - 1)
        }
    }

    #[inline]
    fn before(&self, fid: &RrrFid, b: u64) -> (u64, u64) {
        let (ones, ptr) = fid.prefix_at_block(b);
        if self.ones {
            (ones, ptr)
        } else {
            (b * self.u as u64 - ones, ptr)
        }
    }

    /// Position of target bit `i`, `1 ≤ i ≤ count`.
    pub fn locate(&self, fid: &RrrFid, i: u64) -> u64 {
        debug_assert!(i >= 1 && i <= self.count);
        let run = (i - 1) / self.v;
        let lo = self.c(run);
        let hi = self.c(run + 1);
        if self.kinds.get_unchecked(run) {
            let slot = self.kinds.rank1_unchecked(run);
            let width = bits_for((hi - lo + 1) * self.u as u64 - 1);
            let idx = i - run * self.v - 1;
            let ptr = self.sparse_ptr.get(slot as usize) + idx * width as u64;
            return lo * self.u as u64 + self.sparse.get_bits(ptr as usize, width);
        }
        // Blocks [a, z) hold target bit i; before(a) < i <= before(z).
        let (mut a, mut z) = (lo, hi + 1);
        let (mut before_a, mut ptr_a) = self.before(fid, a);
        while z - a > 1 {
            let len = z - a;
            let (mut na, mut nz) = (a, z);
            let mut last = a;
            for t in 1..self.fanout {
                let bound = a + (len * t).div_ceil(self.fanout);
                if bound <= last || bound >= z {
                    continue;
                }
                last = bound;
                let (cnt, ptr) = self.before(fid, bound);
                if cnt < i {
                    na = bound;
                    before_a = cnt;
                    ptr_a = ptr;
                } else {
                    nz = bound;
                    break;
                }
            }
            if na == a && nz == z {
                // Fanout larger than the range: fall back to the midpoint.
                let mid = a + len / 2;
                let (cnt, ptr) = self.before(fid, mid);
                if cnt < i {
                    na = mid;
                    before_a = cnt;
                    ptr_a = ptr;
                } else {
                    nz = mid;
                }
            }
            a = na;
            z = nz;
        }
        let mut w = fid.block_bits(a, ptr_a);
        if !self.ones {
            w = !w & crate::bitcore::bits::low_mask(self.u);
        }
        a * self.u as u64 + select_in_word_unchecked(w, (i - before_a - 1) as u32) as u64
    }

    pub fn size_bits(&self) -> u64 {
        self.c_index.size_bits()
            + self.kinds.total_bits()
            + self.sparse_ptr.size_bits() as u64
            + self.sparse.len() as u64
    }

    pub fn write_sections(&self, parts: &mut Parts, prefix: &str) {
        self.c_index.write_sections(parts, &join(prefix, "c"));
        self.kinds
            .write_sections(parts, &join(prefix, "segment_kind"));
        parts.section(prefix, "sparse_ptr", self.sparse_ptr.bits().clone());
        parts.section(prefix, "sparse", self.sparse.clone());
    }

    pub fn dense_span(&self) -> u64 {
        self.dense_span
    }
}
