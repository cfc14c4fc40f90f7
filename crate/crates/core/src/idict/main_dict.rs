//! Dictionaries that bucket keys by their high bits and keep the low bits in
//! a [`DictCollection`] addressed through prefix sums of the bucket sizes.

use crate::bitcore::bits::{ceil_lg, floor_lg, low_mask, IntVector};
use crate::error::{out_of_range, Error, Result};
use crate::parts::{join, Parts, PartsReader, Persist};
use crate::prefixsum::{sqrt_lg, BackingKind, SearchablePrefixSum};
use crate::rankselect::{check_set, Fid};
use crate::rrrfid::RrrFid;

use super::bucketed::DEFAULT_D;
use super::collection::DictCollection;

/// Block width of the compressed top-level prefix sums. Their bit strings
/// are long relative to `n`, so wide blocks keep the class array small.
pub const TOP_BLOCK_WIDTH: u32 = 63;

/// Keys split as `x = i·2^shift + low`, bucket sizes as prefix sums, lows
/// in a collection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedDict {
    m: u64,
    shift: u32,
    top: SearchablePrefixSum,
    lows: DictCollection,
}

impl ShiftedDict {
    /// `buckets` must exceed the largest `x >> shift`.
    pub fn build(
        keys: &[u64],
        m: u64,
        shift: u32,
        buckets: u64,
        top_kind: BackingKind,
        d: u64,
        seed: u64,
    ) -> Result<Self> {
        check_set(keys, m)?;
        if shift > 63 {
            return Err(Error::InvalidInput(format!(
                "bucket shift {shift} exceeds 63"
            )));
        }
        let mut sizes = vec![0u64; buckets as usize];
        for &x in keys {
            let b = x >> shift;
            if b >= buckets {
                return Err(Error::InvalidInput(format!(
                    "key {x} beyond the last bucket"
                )));
            }
            sizes[b as usize] += 1;
        }
        let lows: Vec<u64> = keys.iter().map(|&x| x & low_mask(shift)).collect();
        Ok(Self {
            m,
            shift,
            top: SearchablePrefixSum::build_with(&sizes, top_kind),
            lows: DictCollection::build_runs(&lows, &sizes, shift, d, seed)?,
        })
    }

    pub fn len(&self) -> u64 {
        self.lows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn buckets(&self) -> u64 {
        self.top.len()
    }

    pub fn top(&self) -> &SearchablePrefixSum {
        &self.top
    }

    pub fn lows(&self) -> &DictCollection {
        &self.lows
    }

    #[inline]
    pub fn rank_unchecked(&self, x: u64) -> i64 {
        let i = x >> self.shift;
        let st = self.top.sum_unchecked(i);
        let len = self.top.sum_unchecked(i + 1) - st;
        let k = self.lows.rank_in(st, len, x & low_mask(self.shift));
        if k < 0 {
            -1
        } else {
            k + st as i64
        }
    }

    #[inline]
    pub fn select_unchecked(&self, j: u64) -> u64 {
        let b = self.top.pred_unchecked(j);
        let st = self.top.sum_unchecked(b);
        let len = self.top.sum_unchecked(b + 1) - st;
        (b << self.shift) | self.lows.select_in(st, len, j - st)
    }

    pub fn size_bits(&self) -> u64 {
        self.top.size_bits() + Persist::size_bits(&self.lows)
    }
}

impl Persist for ShiftedDict {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "shift", self.shift as u64);
        self.top.write_parts(parts, &join(prefix, "top"));
        self.lows.write_parts(parts, &join(prefix, "lows"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let m = r.field()?;
        let shift = r.field_at_most(63)? as u32;
        let top = SearchablePrefixSum::read_parts(r)?;
        let lows = DictCollection::read_parts(r)?;
        if lows.key_bits() != shift || top.total() != lows.len() {
            return Err(Error::Corrupt(
                "bucket sizes disagree with the key store".into(),
            ));
        }
        if !top.is_empty() && (top.len() - 1) > (m.saturating_sub(1) >> shift) {
            return Err(Error::Corrupt(
                "more buckets than the universe allows".into(),
            ));
        }
        Ok(Self {
            m,
            shift,
            top,
            lows,
        })
    }

    fn size_bits(&self) -> u64 {
        ShiftedDict::size_bits(self)
    }
}

/// Shift `l ≥ 1` with `⌊m/2^l⌋ ≥ n√lg n`, as large as possible; then also
/// `⌊m/2^l⌋ < 2n√lg n + 1`. Requires `m ≥ 2n√lg n`.
pub fn choose_shift(n: u64, m: u64) -> u32 {
    let q = n as f64 * sqrt_lg(n);
    let mut l = 1;
    while l < 63 && (m >> (l + 1)) as f64 >= q {
        l += 1;
    }
    l
}

/// Whether the main dictionary stores `n` keys of `[m]` as a compressed FID.
pub fn main_is_dense(n: u64, m: u64) -> bool {
    (m as f64) < 4.0 * n as f64 * sqrt_lg(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MainRepr {
    Dense(RrrFid),
    Sparse(ShiftedDict),
}

/// Indexable dictionary on `[m]`: a compressed FID for dense sets, else
/// `⌊m/2^l⌋`-way bucketing with compressed bucket-size prefix sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainDict {
    n: u64,
    m: u64,
    repr: MainRepr,
}

impl MainDict {
    pub fn build(keys: &[u64], m: u64, seed: u64) -> Result<Self> {
        Self::build_with(keys, m, DEFAULT_D, seed)
    }

    pub fn build_with(keys: &[u64], m: u64, d: u64, seed: u64) -> Result<Self> {
        let n = keys.len() as u64;
        let shift = (n > 0 && !main_is_dense(n, m)).then(|| choose_shift(n, m));
        Self::build_layout(keys, m, shift, d, seed)
    }

    /// Builds with a given layout: `None` for the dense form, `Some(l)` for
    /// buckets of `2^l` universe values.
    pub fn build_layout(
        keys: &[u64],
        m: u64,
        shift: Option<u32>,
        d: u64,
        seed: u64,
    ) -> Result<Self> {
        check_set(keys, m)?;
        let n = keys.len() as u64;
        let repr = match shift {
            None => MainRepr::Dense(RrrFid::build(keys, m)?),
            Some(l) => {
                if l == 0 || l > 63 || m == 0 {
                    return Err(Error::InvalidInput(format!(
                        "bucket shift {l} for universe {m}"
                    )));
                }
                let buckets = ((m - 1) >> l) + 1;
                MainRepr::Sparse(ShiftedDict::build(
                    keys,
                    m,
                    l,
                    buckets,
                    BackingKind::RrrWidth(TOP_BLOCK_WIDTH),
                    d,
                    seed,
                )?)
            }
        };
        Ok(Self { n, m, repr })
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

    pub fn repr(&self) -> &MainRepr {
        &self.repr
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, MainRepr::Dense(_))
    }

    /// Bucket shift `l` of the sparse form.
    pub fn shift(&self) -> Option<u32> {
        match &self.repr {
            MainRepr::Sparse(s) => Some(s.shift()),
            MainRepr::Dense(_) => None,
        }
    }

    pub fn rank(&self, x: u64) -> Result<i64> {
        if x >= self.m {
            return out_of_range("key", x, format!("0..{}", self.m));
        }
        Ok(self.rank_unchecked(x))
    }

    #[inline]
    pub fn rank_unchecked(&self, x: u64) -> i64 {
        match &self.repr {
            MainRepr::Dense(f) => {
                if f.get_unchecked(x) {
                    f.rank1_unchecked(x) as i64
                } else {
                    -1
                }
            }
            MainRepr::Sparse(s) => s.rank_unchecked(x),
        }
    }

    pub fn select(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.n {
            return out_of_range("select rank", i, format!("1..={}", self.n));
        }
        Ok(self.select_unchecked(i))
    }

    #[inline]
    pub fn select_unchecked(&self, i: u64) -> u64 {
        match &self.repr {
            MainRepr::Dense(f) => f.select1_unchecked(i),
            MainRepr::Sparse(s) => s.select_unchecked(i),
        }
    }

    /// Number of keys below `x`, whether or not `x` is a member. Used for
    /// boundary ranks of pair dictionaries; in the sparse form only exact at
    /// bucket boundaries (`x` a multiple of `2^l`).
    pub fn bucket_boundary_rank(&self, x: u64) -> u64 {
        match &self.repr {
            MainRepr::Dense(f) => f.rank1_unchecked(x.min(self.m)),
            MainRepr::Sparse(s) => {
                let i = x >> s.shift();
                s.top().sum_unchecked(i.min(s.buckets()))
            }
        }
    }

    pub fn to_keys(&self) -> Vec<u64> {
        (1..=self.n).map(|i| self.select_unchecked(i)).collect()
    }

    pub fn size_bits(&self) -> u64 {
        match &self.repr {
            MainRepr::Dense(f) => f.total_bits(),
            MainRepr::Sparse(s) => s.size_bits(),
        }
    }
}

impl Persist for MainDict {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "n", self.n);
        parts.field(prefix, "m", self.m);
        match &self.repr {
            MainRepr::Dense(f) => {
                parts.field(prefix, "dense", 1);
                f.write_parts(parts, &join(prefix, "fid"));
            }
            MainRepr::Sparse(s) => {
                parts.field(prefix, "dense", 0);
                s.write_parts(parts, &join(prefix, "buckets"));
            }
        }
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let n = r.field()?;
        let m = r.field()?;
        let repr = match r.field()? {
            1 => MainRepr::Dense(RrrFid::read_parts(r)?),
            0 => MainRepr::Sparse(ShiftedDict::read_parts(r)?),
            t => return Err(Error::Corrupt(format!("unknown dictionary form {t}"))),
        };
        let ok = match &repr {
            MainRepr::Dense(f) => f.ones() == n && f.universe() == m,
            MainRepr::Sparse(s) => s.len() == n && s.m == m,
        };
        if !ok {
            return Err(Error::Corrupt(
                "dictionary shape disagrees with its parts".into(),
            ));
        }
        Ok(Self { n, m, repr })
    }

    fn size_bits(&self) -> u64 {
        MainDict::size_bits(self)
    }
}

/// Dictionary bucketing by the top `⌊lg n⌋` of `⌈lg m⌉` key bits, with plain
/// bucket-size prefix sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLevelDict {
    n: u64,
    m: u64,
    inner: ShiftedDict,
}

impl TwoLevelDict {
    pub fn build(keys: &[u64], m: u64, seed: u64) -> Result<Self> {
        let n = keys.len() as u64;
        let top_bits = floor_lg(n);
        let shift = ceil_lg(m).saturating_sub(top_bits);
        let inner = ShiftedDict::build(
            keys,
            m,
            shift,
            1 << top_bits,
            BackingKind::Plain,
            DEFAULT_D,
            seed,
        )?;
        Ok(Self { n, m, inner })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn inner(&self) -> &ShiftedDict {
        &self.inner
    }

    /// `n(⌈lg m⌉ − ⌊lg n⌋ + 2)`.
    pub fn reference_bits(&self) -> u64 {
        self.n * (ceil_lg(self.m) as u64 - floor_lg(self.n) as u64 + 2)
    }

    pub fn rank(&self, x: u64) -> Result<i64> {
        if x >= self.m {
            return out_of_range("key", x, format!("0..{}", self.m));
        }
        Ok(self.inner.rank_unchecked(x))
    }

    pub fn select(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.n {
            return out_of_range("select rank", i, format!("1..={}", self.n));
        }
        Ok(self.inner.select_unchecked(i))
    }

    pub fn size_bits(&self) -> u64 {
        self.inner.size_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectOnlyRepr {
    Dense(RrrFid),
    Sparse {
        shift: u32,
        top: SearchablePrefixSum,
        lows: IntVector,
    },
}

/// Set supporting only select: bucket sizes as prefix sums and the low bits
/// of every key in one sorted array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectOnlySet {
    n: u64,
    m: u64,
    repr: SelectOnlyRepr,
}

impl SelectOnlySet {
    pub fn build(keys: &[u64], m: u64) -> Result<Self> {
        check_set(keys, m)?;
        let n = keys.len() as u64;
        let repr = if n == 0 || main_is_dense(n, m) {
            SelectOnlyRepr::Dense(RrrFid::build(keys, m)?)
        } else {
            let shift = choose_shift(n, m);
            let buckets = ((m - 1) >> shift) + 1;
            let mut sizes = vec![0u64; buckets as usize];
            for &x in keys {
                sizes[(x >> shift) as usize] += 1;
            }
            let lows: Vec<u64> = keys.iter().map(|&x| x & low_mask(shift)).collect();
            SelectOnlyRepr::Sparse {
                shift,
                top: SearchablePrefixSum::build_with(
                    &sizes,
                    BackingKind::RrrWidth(TOP_BLOCK_WIDTH),
                ),
                lows: IntVector::from_slice_width(&lows, shift),
            }
        };
        Ok(Self { n, m, repr })
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

    pub fn repr(&self) -> &SelectOnlyRepr {
        &self.repr
    }

    pub fn select(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.n {
            return out_of_range("select rank", i, format!("1..={}", self.n));
        }
        Ok(self.select_unchecked(i))
    }

    #[inline]
    pub fn select_unchecked(&self, i: u64) -> u64 {
        match &self.repr {
            SelectOnlyRepr::Dense(f) => f.select1_unchecked(i),
            SelectOnlyRepr::Sparse { shift, top, lows } => {
                let b = top.pred_unchecked(i);
                (b << shift) | lows.get(i as usize - 1)
            }
        }
    }

    pub fn size_bits(&self) -> u64 {
        match &self.repr {
            SelectOnlyRepr::Dense(f) => f.total_bits(),
            SelectOnlyRepr::Sparse { top, lows, .. } => top.size_bits() + lows.size_bits() as u64,
        }
    }
}

impl Persist for SelectOnlySet {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "n", self.n);
        parts.field(prefix, "m", self.m);
        match &self.repr {
            SelectOnlyRepr::Dense(f) => {
                parts.field(prefix, "dense", 1);
                f.write_parts(parts, &join(prefix, "fid"));
            }
            SelectOnlyRepr::Sparse { shift, top, lows } => {
                parts.field(prefix, "dense", 0);
                parts.field(prefix, "shift", *shift as u64);
                top.write_parts(parts, &join(prefix, "top"));
                parts.section(prefix, "lows", lows.bits().clone());
            }
        }
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let n = r.field()?;
        let m = r.field()?;
        let repr = match r.field()? {
            1 => {
                let f = RrrFid::read_parts(r)?;
                if f.ones() != n || f.universe() != m {
                    return Err(Error::Corrupt("select-only set shape mismatch".into()));
                }
                SelectOnlyRepr::Dense(f)
            }
            0 => {
                let shift = r.field_at_most(63)? as u32;
                let top = SearchablePrefixSum::read_parts(r)?;
                if top.total() != n {
                    return Err(Error::Corrupt("select-only bucket sizes mismatch".into()));
                }
                let raw = r.section_len(n * shift as u64)?;
                let mut lows = IntVector::with_len(n as usize, shift);
                for i in 0..n as usize {
                    lows.set(i, raw.get_bits(i * shift as usize, shift));
                }
                SelectOnlyRepr::Sparse { shift, top, lows }
            }
            t => return Err(Error::Corrupt(format!("unknown select-only form {t}"))),
        };
        Ok(Self { n, m, repr })
    }

    fn size_bits(&self) -> u64 {
        SelectOnlySet::size_bits(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashkit::mix64;

    fn random_set(n: usize, m: u64, seed: u64) -> Vec<u64> {
        let mut x = seed;
        let mut v: Vec<u64> = (0..n + n / 2 + 8)
            .map(|_| {
                x = mix64(x);
                x % m
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v.truncate(n);
        v
    }

    #[test]
    fn example_set() {
        let keys = [2u64, 3, 5, 7, 11, 13];
        let d = MainDict::build(&keys, 16, 1).unwrap();
        assert_eq!(d.rank(7).unwrap(), 3);
        assert_eq!(d.select(5).unwrap(), 11);
        assert_eq!(d.rank(1).unwrap(), -1);
        assert!(d.rank(16).is_err());
        let s = SelectOnlySet::build(&[2, 3, 5], 16).unwrap();
        assert_eq!(s.select(3).unwrap(), 5);
    }

    #[test]
    fn dense_case_is_compressed_fid() {
        let keys: Vec<u64> = (0..500u64).map(|i| 2 * i + (i % 3 == 0) as u64).collect();
        let d = MainDict::build(&keys, 1000, 1).unwrap();
        assert!(d.is_dense());
        let id: Vec<u64> = (0..64).collect();
        let d = MainDict::build(&id, 64, 1).unwrap();
        for x in 0..64 {
            assert_eq!(d.rank(x).unwrap(), x as i64);
            assert_eq!(d.select(x + 1).unwrap(), x);
        }
    }

    #[test]
    fn shift_brackets() {
        let (n, m) = (1u64 << 10, 1u64 << 30);
        let l = choose_shift(n, m);
        let q = n as f64 * sqrt_lg(n);
        let top = (m >> l) as f64;
        assert!(q <= top && top < 2.0 * q, "l = {l}");
        let d = MainDict::build(&random_set(n as usize, m, 1), m, 1).unwrap();
        assert_eq!(d.shift(), Some(l));
    }

    #[test]
    fn sparse_dicts_match_oracle() {
        for (k, &(n, m)) in [
            (1usize, 1u64 << 32),
            (100, 1 << 20),
            (5000, 1 << 32),
            (20000, 1 << 25),
        ]
        .iter()
        .enumerate()
        {
            let keys = random_set(n, m, k as u64);
            let d = MainDict::build(&keys, m, 7).unwrap();
            let two = TwoLevelDict::build(&keys, m, 7).unwrap();
            let so = SelectOnlySet::build(&keys, m).unwrap();
            assert!(!d.is_dense());
            for (i, &x) in keys.iter().enumerate() {
                let i1 = i as u64 + 1;
                assert_eq!(d.select(i1).unwrap(), x);
                assert_eq!(two.select(i1).unwrap(), x);
                assert_eq!(so.select(i1).unwrap(), x);
                assert_eq!(d.rank(x).unwrap(), i as i64);
                assert_eq!(two.rank(x).unwrap(), i as i64);
            }
            let mut y = 99u64;
            for _ in 0..5000 {
                y = mix64(y);
                let x = y % m;
                let expect = keys.binary_search(&x).map(|p| p as i64).unwrap_or(-1);
                assert_eq!(d.rank(x).unwrap(), expect);
                assert_eq!(two.rank(x).unwrap(), expect);
            }
            assert_eq!(MainDict::from_parts(&d.to_parts()).unwrap(), d);
            assert_eq!(SelectOnlySet::from_parts(&so.to_parts()).unwrap(), so);
        }
    }

    #[test]
    fn skewed_buckets_get_bucketed() {
        // A dense cluster inside a sparse universe overloads a few buckets.
        let mut keys: Vec<u64> = (0..6000u64).map(|i| (1 << 28) + 3 * i).collect();
        keys.extend((0..200u64).map(|i| (1 << 33) + i * (1 << 20)));
        let m = 1u64 << 36;
        let d = MainDict::build(&keys, m, 5).unwrap();
        let MainRepr::Sparse(s) = d.repr() else {
            panic!("expected sparse form")
        };
        let sizes = s.top().to_values();
        assert!(
            sizes.iter().any(|&b| s.lows().set_is_bucketed(b)),
            "c = {}",
            s.lows().c()
        );
        for (i, &x) in keys.iter().enumerate() {
            assert_eq!(d.select(i as u64 + 1).unwrap(), x);
            assert_eq!(d.rank(x).unwrap(), i as i64);
            assert_eq!(
                d.rank(x + 1).unwrap(),
                if keys.binary_search(&(x + 1)).is_ok() {
                    i as i64 + 1
                } else {
                    -1
                }
            );
        }
    }

    #[test]
    fn empty_and_singleton() {
        let e = MainDict::build(&[], 100, 0).unwrap();
        assert!((0..100).all(|x| e.rank(x).unwrap() == -1));
        assert!(e.select(1).is_err());
        let s = MainDict::build(&[12345], 1 << 40, 0).unwrap();
        assert_eq!(s.select(1).unwrap(), 12345);
        assert_eq!(s.rank(12345).unwrap(), 0);
        assert_eq!(s.rank(12344).unwrap(), -1);
        let so = SelectOnlySet::build(&[77], 1 << 40).unwrap();
        assert_eq!(so.select(1).unwrap(), 77);
    }
}
