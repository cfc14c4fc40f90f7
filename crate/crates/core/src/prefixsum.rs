//! Searchable prefix sums over a sequence of non-negative integers.
//!
//! `x_1, …, x_n` is written as `x_i` zeros followed by a one, and the
//! resulting `(m + n)`-bit string is stored as a FID. Then
//! `Sum(i) = select1(i) − i + 1` and `Pred(x) = select0(x) − x + 1`.

use crate::bitcore::BitVector;
use crate::error::{out_of_range, Error, Result};
use crate::multiset::SelectOnlyMultiset;
use crate::parts::{Parts, PartsReader, Persist};
use crate::rankselect::{Fid, RsDirectory};
use crate::rrrfid::{default_block_width, RrrFid};

/// `√lg n` with `lg n` clamped to at least 1.
pub fn sqrt_lg(n: u64) -> f64 {
    (n.max(2) as f64).log2().max(1.0).sqrt()
}

/// Whether `n` ones in a universe of `len` bits count as dense.
pub fn is_dense(n: u64, len: u64) -> bool {
    n > 0 && (len as f64) <= 4.0 * n as f64 * sqrt_lg(n)
}

/// `Sum(i)` for `0 ≤ i ≤ ones` on a unary prefix-sum encoding; `Sum(0) = 0`.
#[inline]
pub fn unary_sum<F: Fid + ?Sized>(f: &F, i: u64) -> u64 {
    if i == 0 {
        0
    } else {
        f.select1_unchecked(i) + 1 - i
    }
}

/// `Pred(x)` for `1 ≤ x ≤ zeros` on a unary prefix-sum encoding.
#[inline]
pub fn unary_pred<F: Fid + ?Sized>(f: &F, x: u64) -> u64 {
    f.select0_unchecked(x) + 1 - x
}

/// Unary encoding of `xs`: each value as that many zeros, then a one.
pub fn unary_encode(xs: &[u64]) -> BitVector {
    let total: u64 = xs.iter().sum();
    let mut bits = BitVector::with_capacity((total + xs.len() as u64) as usize);
    for &x in xs {
        bits.push_zeros(x as usize);
        bits.push(true);
    }
    bits
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackingKind {
    Auto,
    Plain,
    Rrr,
    /// Compressed with an explicit block width.
    RrrWidth(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backing {
    Plain(RsDirectory),
    Rrr(RrrFid),
}

impl Backing {
    pub fn build(bits: &BitVector, kind: BackingKind) -> Backing {
        let ones = bits.count_ones() as u64;
        let width = match kind {
            BackingKind::Plain => None,
            BackingKind::Rrr => Some(default_block_width(bits.len() as u64)),
            BackingKind::RrrWidth(u) => Some(u),
            BackingKind::Auto => {
                is_dense(ones, bits.len() as u64).then(|| default_block_width(bits.len() as u64))
            }
        };
        match width {
            Some(u) => Backing::Rrr(RrrFid::from_bitvector(bits, u).expect("valid block width")),
            None => Backing::Plain(RsDirectory::from_bitvector(bits)),
        }
    }

    pub fn fid(&self) -> &dyn Fid {
        match self {
            Backing::Plain(d) => d,
            Backing::Rrr(r) => r,
        }
    }

    pub fn is_rrr(&self) -> bool {
        matches!(self, Backing::Rrr(_))
    }

    pub fn size_bits(&self) -> u64 {
        match self {
            Backing::Plain(d) => d.total_bits(),
            Backing::Rrr(r) => r.total_bits(),
        }
    }
}

impl Persist for Backing {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        match self {
            Backing::Plain(d) => {
                parts.field(prefix, "backing", 0);
                d.write_parts(parts, &crate::parts::join(prefix, "plain"));
            }
            Backing::Rrr(r) => {
                parts.field(prefix, "backing", 1);
                r.write_parts(parts, &crate::parts::join(prefix, "rrr"));
            }
        }
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        match r.field()? {
            0 => Ok(Backing::Plain(RsDirectory::read_parts(r)?)),
            1 => Ok(Backing::Rrr(RrrFid::read_parts(r)?)),
            t => Err(Error::Corrupt(format!("unknown backing tag {t}"))),
        }
    }

    fn size_bits(&self) -> u64 {
        Backing::size_bits(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchablePrefixSum {
    backing: Backing,
}

impl SearchablePrefixSum {
    pub fn build(xs: &[u64]) -> Self {
        Self::build_with(xs, BackingKind::Auto)
    }

    pub fn build_with(xs: &[u64], kind: BackingKind) -> Self {
        Self {
            backing: Backing::build(&unary_encode(xs), kind),
        }
    }

    pub fn from_backing(backing: Backing) -> Self {
        Self { backing }
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    /// Sequence length `n`.
    pub fn len(&self) -> u64 {
        self.backing.fid().ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `m = Σ x_i`.
    pub fn total(&self) -> u64 {
        self.backing.fid().zeros()
    }

    /// `Σ_{j ≤ i} x_j` for `1 ≤ i ≤ n`.
    pub fn sum(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.len() {
            return out_of_range("sum index", i, format!("1..={}", self.len()));
        }
        Ok(unary_sum(self.backing.fid(), i))
    }

    /// `Sum(i)` extended with `Sum(0) = 0`; `i ≤ n`.
    #[inline]
    pub fn sum_unchecked(&self, i: u64) -> u64 {
        unary_sum(self.backing.fid(), i)
    }

    /// `max{i ≤ n : Sum(i) < x}` (0 if none) for `1 ≤ x ≤ m`.
    pub fn pred(&self, x: u64) -> Result<u64> {
        if x == 0 || x > self.total() {
            return out_of_range("pred argument", x, format!("1..={}", self.total()));
        }
        Ok(unary_pred(self.backing.fid(), x))
    }

    #[inline]
    pub fn pred_unchecked(&self, x: u64) -> u64 {
        unary_pred(self.backing.fid(), x)
    }

    /// Recovers `x_1, …, x_n`.
    pub fn to_values(&self) -> Vec<u64> {
        let mut prev = 0;
        (1..=self.len())
            .map(|i| {
                let s = self.sum_unchecked(i);
                let x = s - prev;
                prev = s;
                x
            })
            .collect()
    }

    pub fn size_bits(&self) -> u64 {
        self.backing.size_bits()
    }
}

impl Persist for SearchablePrefixSum {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        self.backing.write_parts(parts, prefix);
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        Ok(Self {
            backing: Backing::read_parts(r)?,
        })
    }

    fn size_bits(&self) -> u64 {
        self.backing.size_bits()
    }
}

/// Prefix sums answering only `Sum`, stored as the multiset of partial sums
/// `{Sum(1), …, Sum(n)} ⊆ [0, m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumOnlyPrefixSum {
    sums: SelectOnlyMultiset,
}

impl SumOnlyPrefixSum {
    pub fn build(xs: &[u64]) -> Result<Self> {
        let mut acc = 0u64;
        let mut sums = Vec::with_capacity(xs.len());
        for &x in xs {
            acc = acc
                .checked_add(x)
                .ok_or_else(|| Error::InvalidInput("prefix sums overflow".into()))?;
            sums.push(acc);
        }
        Ok(Self {
            sums: SelectOnlyMultiset::build(&sums, acc + 1)?,
        })
    }

    pub fn len(&self) -> u64 {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.sums.universe() - 1
    }

    pub fn partial_sums(&self) -> &SelectOnlyMultiset {
        &self.sums
    }

    pub fn sum(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.len() {
            return out_of_range("sum index", i, format!("1..={}", self.len()));
        }
        Ok(self.sums.selectm_unchecked(i))
    }

    pub fn size_bits(&self) -> u64 {
        self.sums.size_bits()
    }
}

impl Persist for SumOnlyPrefixSum {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        self.sums.write_parts(parts, prefix);
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let sums = SelectOnlyMultiset::read_parts(r)?;
        if sums.universe() == 0 {
            return Err(Error::Corrupt("partial-sum universe is empty".into()));
        }
        let n = sums.len();
        if n > 0 && sums.selectm_unchecked(n) != sums.universe() - 1 {
            return Err(Error::Corrupt(
                "last partial sum differs from the total".into(),
            ));
        }
        Ok(Self { sums })
    }

    fn size_bits(&self) -> u64 {
        self.sums.size_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(unary_encode(&[3, 0, 5]).to_bit_string(), "00011000001");
        assert_eq!(unary_encode(&[0, 0, 0]).to_bit_string(), "111");
        for kind in [BackingKind::Plain, BackingKind::Rrr, BackingKind::Auto] {
            let ps = SearchablePrefixSum::build_with(&[3, 0, 5], kind);
            assert_eq!(ps.sum(2).unwrap(), 3);
            assert_eq!(ps.sum(3).unwrap(), 8);
            assert_eq!(ps.sum(3).unwrap(), ps.total());
            assert_eq!(ps.pred(4).unwrap(), 2);
            assert_eq!(ps.pred(1).unwrap(), 0);
            assert_eq!(ps.pred(8).unwrap(), 2);
            assert!(ps.sum(0).is_err());
            assert!(ps.sum(4).is_err());
            assert!(ps.pred(0).is_err());
            assert!(ps.pred(9).is_err());
        }
        let empty = SearchablePrefixSum::build(&[]);
        assert!(empty.is_empty());
        assert!(empty.sum(1).is_err());
    }

    #[test]
    fn round_trip_and_pred_scan() {
        let xs: Vec<u64> = (0..500u64).map(|i| (i * 7919) % 13).collect();
        for kind in [BackingKind::Plain, BackingKind::Rrr] {
            let ps = SearchablePrefixSum::build_with(&xs, kind);
            assert_eq!(ps.to_values(), xs);
            let sums: Vec<u64> = xs
                .iter()
                .scan(0, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect();
            for x in 1..=ps.total() {
                let expect = sums.iter().filter(|&&s| s < x).count() as u64;
                assert_eq!(ps.pred(x).unwrap(), expect, "pred({x})");
            }
        }
    }

    #[test]
    fn persist_round_trip() {
        let ps = SearchablePrefixSum::build(&[1, 2, 3, 0, 0, 9]);
        let parts = ps.to_parts();
        assert_eq!(SearchablePrefixSum::from_parts(&parts).unwrap(), ps);
    }

    #[test]
    fn sum_only_examples() {
        let p = SumOnlyPrefixSum::build(&[3, 0, 5]).unwrap();
        assert_eq!(p.partial_sums().set().len(), 3);
        assert_eq!(
            (1..=3).map(|i| p.sum(i).unwrap()).collect::<Vec<_>>(),
            [3, 3, 8]
        );
        let q = SumOnlyPrefixSum::build(&[1, 1, 1, 1]).unwrap();
        assert_eq!(q.sum(3).unwrap(), 3);
        let e = SumOnlyPrefixSum::build(&[]).unwrap();
        assert!(e.is_empty() && e.sum(1).is_err());
        assert_eq!(SumOnlyPrefixSum::from_parts(&p.to_parts()).unwrap(), p);
    }
}
