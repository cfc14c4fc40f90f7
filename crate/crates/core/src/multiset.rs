//! Indexable multisets over `[m]`.
//!
//! The dense form writes each value `v` as a one followed by one zero per
//! copy of `v`, giving `m` ones and `n` zeros. The sparse form keeps the
//! distinct values in a [`MainDict`] and the multiplicities as runs in an
//! `n`-bit string. The select-only form stores `{x_i + i}` as a
//! [`SelectOnlySet`].

use crate::bitcore::{info_bound, BitVector};
use crate::error::{out_of_range, Error, Result};
use crate::idict::{MainDict, SelectOnlySet};
use crate::parts::{join, Parts, PartsReader, Persist};
use crate::prefixsum::{sqrt_lg, Backing, BackingKind};
use crate::rankselect::Fid;
use crate::rrrfid::RrrFid;

/// Validates a non-decreasing sequence inside `[0, m)`.
pub fn check_multiset(values: &[u64], m: u64) -> Result<()> {
    if let Some(w) = values.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput(format!(
            "values not non-decreasing at index {}",
            w + 1
        )));
    }
    if let Some(&x) = values.last() {
        if x >= m {
            return Err(Error::InvalidInput(format!(
                "value {x} outside universe {m}"
            )));
        }
    }
    Ok(())
}

/// Whether the dense form is chosen: `m ≤ 4n√lg n`.
pub fn multiset_is_dense(n: u64, m: u64) -> bool {
    n > 0 && (m as f64) <= 4.0 * n as f64 * sqrt_lg(n)
}

fn check_value(x: u64, m: u64) -> Result<()> {
    if x >= m {
        return out_of_range("value", x, format!("0..{m}"));
    }
    Ok(())
}

fn check_index(i: u64, n: u64) -> Result<()> {
    if i == 0 || i > n {
        return out_of_range("select rank", i, format!("1..={n}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMultiset {
    m: u64,
    n: u64,
    fid: RrrFid,
}

impl DenseMultiset {
    pub fn build(values: &[u64], m: u64) -> Result<Self> {
        check_multiset(values, m)?;
        let n = values.len() as u64;
        let len = m
            .checked_add(n)
            .ok_or_else(|| Error::InvalidInput("universe plus size overflows".into()))?;
        let mut ones = Vec::with_capacity(m as usize);
        let mut below = 0usize;
        for v in 0..m {
            while below < values.len() && values[below] < v {
                below += 1;
            }
            ones.push(v + below as u64);
        }
        Ok(Self {
            m,
            n,
            fid: RrrFid::build(&ones, len)?,
        })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn fid(&self) -> &RrrFid {
        &self.fid
    }

    /// Positions of the ones in the `(m+n)`-bit encoding.
    pub fn encoding(&self) -> Vec<u64> {
        self.fid.to_elements()
    }

    /// Copies of values below `x`, whether or not `x` occurs.
    pub fn rankm_plus(&self, x: u64) -> Result<u64> {
        check_value(x, self.m)?;
        Ok(self.fid.select1_unchecked(x + 1) - x)
    }

    pub fn rankm(&self, x: u64) -> Result<i64> {
        check_value(x, self.m)?;
        let p = self.fid.select1_unchecked(x + 1);
        let present = p + 1 < self.m + self.n && !self.fid.get_unchecked(p + 1);
        Ok(if present { (p - x) as i64 } else { -1 })
    }

    pub fn selectm(&self, i: u64) -> Result<u64> {
        check_index(i, self.n)?;
        Ok(self.fid.select0_unchecked(i) - i)
    }

    pub fn size_bits(&self) -> u64 {
        self.fid.total_bits()
    }
}

impl Persist for DenseMultiset {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "n", self.n);
        self.fid.write_parts(parts, &join(prefix, "fid"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let m = r.field()?;
        let n = r.field()?;
        let fid = RrrFid::read_parts(r)?;
        if fid.ones() != m || m.checked_add(n) != Some(fid.universe()) {
            return Err(Error::Corrupt(
                "multiset encoding has the wrong shape".into(),
            ));
        }
        Ok(Self { m, n, fid })
    }

    fn size_bits(&self) -> u64 {
        DenseMultiset::size_bits(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMultiset {
    m: u64,
    n: u64,
    distinct: MainDict,
    runs: Backing,
}

impl SparseMultiset {
    pub fn build(values: &[u64], m: u64, seed: u64) -> Result<Self> {
        check_multiset(values, m)?;
        let n = values.len() as u64;
        let mut distinct = values.to_vec();
        distinct.dedup();
        let nd = distinct.len() as u64;
        let mut runs = BitVector::with_capacity(values.len());
        for (k, &v) in values.iter().enumerate() {
            runs.push(k == 0 || values[k - 1] != v);
        }
        let kind = if nd > 0 && (n as f64) <= 4.0 * nd as f64 * sqrt_lg(nd) {
            BackingKind::Rrr
        } else {
            BackingKind::Plain
        };
        if nd > 0 && (nd as f64) < n as f64 / sqrt_lg(n) {
            let lhs = info_bound(nd, m)? + n;
            let rhs = info_bound(n, m + n)? + n;
            if lhs > rhs {
                return Err(Error::Construction(format!(
                    "distinct-plus-runs bound {lhs} exceeds {rhs}"
                )));
            }
        }
        Ok(Self {
            m,
            n,
            distinct: MainDict::build(&distinct, m, seed)?,
            runs: Backing::build(&runs, kind),
        })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn distinct(&self) -> &MainDict {
        &self.distinct
    }

    pub fn runs(&self) -> &Backing {
        &self.runs
    }

    pub fn rankm(&self, x: u64) -> Result<i64> {
        check_value(x, self.m)?;
        let r = self.distinct.rank_unchecked(x);
        if r < 0 {
            return Ok(-1);
        }
        Ok(self.runs.fid().select1_unchecked(r as u64 + 1) as i64)
    }

    pub fn selectm(&self, i: u64) -> Result<u64> {
        check_index(i, self.n)?;
        let r = self.runs.fid().rank1_unchecked(i);
        Ok(self.distinct.select_unchecked(r))
    }

    pub fn size_bits(&self) -> u64 {
        self.distinct.size_bits() + self.runs.size_bits()
    }
}

impl Persist for SparseMultiset {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "n", self.n);
        self.distinct.write_parts(parts, &join(prefix, "distinct"));
        self.runs.write_parts(parts, &join(prefix, "runs"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let m = r.field()?;
        let n = r.field()?;
        let distinct = MainDict::read_parts(r)?;
        let runs = Backing::read_parts(r)?;
        let f = runs.fid();
        if distinct.universe() != m || f.universe() != n || f.ones() != distinct.len() {
            return Err(Error::Corrupt("multiset parts disagree".into()));
        }
        if n > 0 && !f.get_unchecked(0) {
            return Err(Error::Corrupt("run string must start with a one".into()));
        }
        Ok(Self {
            m,
            n,
            distinct,
            runs,
        })
    }

    fn size_bits(&self) -> u64 {
        SparseMultiset::size_bits(self)
    }
}

/// A multiset supporting membership-gated rank and select.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexableMultiset {
    Dense(DenseMultiset),
    Sparse(SparseMultiset),
}

impl IndexableMultiset {
    pub fn build(values: &[u64], m: u64, seed: u64) -> Result<Self> {
        check_multiset(values, m)?;
        if multiset_is_dense(values.len() as u64, m) {
            Ok(Self::Dense(DenseMultiset::build(values, m)?))
        } else {
            Ok(Self::Sparse(SparseMultiset::build(values, m, seed)?))
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Self::Dense(d) => d.len(),
            Self::Sparse(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> u64 {
        match self {
            Self::Dense(d) => d.universe(),
            Self::Sparse(s) => s.universe(),
        }
    }

    pub fn rankm(&self, x: u64) -> Result<i64> {
        match self {
            Self::Dense(d) => d.rankm(x),
            Self::Sparse(s) => s.rankm(x),
        }
    }

    /// Only the dense form answers this.
    pub fn rankm_plus(&self, x: u64) -> Result<u64> {
        match self {
            Self::Dense(d) => d.rankm_plus(x),
            Self::Sparse(_) => Err(Error::Unsupported(
                "rankm_plus on the sparse multiset".into(),
            )),
        }
    }

    pub fn selectm(&self, i: u64) -> Result<u64> {
        match self {
            Self::Dense(d) => d.selectm(i),
            Self::Sparse(s) => s.selectm(i),
        }
    }

    pub fn size_bits(&self) -> u64 {
        match self {
            Self::Dense(d) => d.size_bits(),
            Self::Sparse(s) => s.size_bits(),
        }
    }
}

impl Persist for IndexableMultiset {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        match self {
            Self::Dense(d) => {
                parts.field(prefix, "dense", 1);
                d.write_parts(parts, &join(prefix, "dense"));
            }
            Self::Sparse(s) => {
                parts.field(prefix, "dense", 0);
                s.write_parts(parts, &join(prefix, "sparse"));
            }
        }
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        match r.field()? {
            1 => Ok(Self::Dense(DenseMultiset::read_parts(r)?)),
            0 => Ok(Self::Sparse(SparseMultiset::read_parts(r)?)),
            t => Err(Error::Corrupt(format!("unknown multiset form {t}"))),
        }
    }

    fn size_bits(&self) -> u64 {
        IndexableMultiset::size_bits(self)
    }
}

/// Multiset supporting only `selectm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectOnlyMultiset {
    m: u64,
    set: SelectOnlySet,
}

impl SelectOnlyMultiset {
    pub fn build(values: &[u64], m: u64) -> Result<Self> {
        check_multiset(values, m)?;
        let n = values.len() as u64;
        let len = m
            .checked_add(n)
            .ok_or_else(|| Error::InvalidInput("universe plus size overflows".into()))?;
        let shifted: Vec<u64> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| v + i as u64 + 1)
            .collect();
        Ok(Self {
            m,
            set: SelectOnlySet::build(&shifted, len)?,
        })
    }

    pub fn len(&self) -> u64 {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn set(&self) -> &SelectOnlySet {
        &self.set
    }

    pub fn selectm(&self, i: u64) -> Result<u64> {
        Ok(self.set.select(i)? - i)
    }

    #[inline]
    pub fn selectm_unchecked(&self, i: u64) -> u64 {
        self.set.select_unchecked(i) - i
    }

    pub fn size_bits(&self) -> u64 {
        self.set.size_bits()
    }
}

impl Persist for SelectOnlyMultiset {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "m", self.m);
        self.set.write_parts(parts, &join(prefix, "set"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let m = r.field()?;
        let set = SelectOnlySet::read_parts(r)?;
        if m.checked_add(set.len()) != Some(set.universe()) {
            return Err(Error::Corrupt("select-only multiset shape".into()));
        }
        Ok(Self { m, set })
    }

    fn size_bits(&self) -> u64 {
        SelectOnlyMultiset::size_bits(self)
    }
}
