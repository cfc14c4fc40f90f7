//! Many sets of `r`-bit keys in one payload.
//!
//! Set `i` with `n_i` keys occupies exactly `n_i·r` bits starting at
//! `(Σ_{j<i} n_j)·r`, so its location follows from a prefix-sum oracle
//! supplied by the caller. A set is bucketed when `n_i > d` and its bucketed
//! form `n_i(r − ⌈lg n_i⌉ + 8 + c)` fits, i.e. `⌈lg n_i⌉ ≥ 8 + c`; otherwise
//! its keys are stored explicitly. One `c` and one shared function store
//! serve all sets, and leaves are numbered globally by the index of their
//! first key in the concatenated sets.

use crate::bitcore::bits::{ceil_lg, BitVector};
use crate::error::{out_of_range, Error, Result};
use crate::hashkit::{SharedFunctionStore, StoreBuilder};
use crate::parts::{Parts, PartsReader, Persist};
use crate::prefixsum::{BackingKind, SearchablePrefixSum};

use super::bucketed::{emit, explicit_get, explicit_rank, plan, Env, SetPlan, DEFAULT_D};
use super::leaf::check_keys;

#[inline]
fn is_bucketed(n: u64, d: u64, c: u32) -> bool {
    n > d && ceil_lg(n) >= 8 + c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DictCollection {
    r: u32,
    n: u64,
    d: u64,
    c: u32,
    payload: BitVector,
    store: SharedFunctionStore,
}

impl DictCollection {
    /// Builds from the concatenation `keys` of sets with the given `sizes`.
    /// Each set must be strictly increasing inside `[2^r]`.
    pub fn build_runs(keys: &[u64], sizes: &[u64], r: u32, d: u64, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput(
                "base-case threshold d must be at least 1".into(),
            ));
        }
        if r > 63 {
            return Err(Error::InvalidInput(format!("key width {r} exceeds 63")));
        }
        let n = keys.len() as u64;
        if sizes.iter().sum::<u64>() != n {
            return Err(Error::InvalidInput(
                "set sizes do not add up to the key count".into(),
            ));
        }
        let mut starts = Vec::with_capacity(sizes.len());
        let mut acc = 0usize;
        for &s in sizes {
            let set = &keys[acc..acc + s as usize];
            check_keys(set, r)?;
            starts.push(acc);
            acc += s as usize;
        }
        let mut plans: Vec<Option<SetPlan>> = Vec::with_capacity(sizes.len());
        let mut c = 0u32;
        for (&s, &st) in sizes.iter().zip(&starts) {
            if s > d {
                let p = plan(&keys[st..st + s as usize], r, d, n, seed, st as u64)?;
                c = c.max(p.c_needed);
                plans.push(Some(p));
            } else {
                plans.push(None);
            }
        }
        let mut payload = BitVector::with_capacity((n * r as u64) as usize);
        let mut sb = StoreBuilder::new(seed);
        for ((&s, &st), p) in sizes.iter().zip(&starts).zip(&plans) {
            let set = &keys[st..st + s as usize];
            let pos = st * r as usize;
            debug_assert_eq!(payload.len(), pos);
            match p {
                Some(p) if is_bucketed(s, d, c) => {
                    for leaf in &p.leaves {
                        sb.insert(leaf.global, leaf.attempt);
                    }
                    emit(set, r, d, c, p, &mut payload)?;
                    payload.push_zeros(pos + s as usize * r as usize - payload.len());
                }
                _ => {
                    for &x in set {
                        payload.push_bits(x, r);
                    }
                }
            }
        }
        Ok(Self {
            r,
            n,
            d,
            c,
            payload,
            store: sb.finish()?,
        })
    }

    pub fn build(sets: &[Vec<u64>], r: u32, seed: u64) -> Result<Self> {
        let keys: Vec<u64> = sets.iter().flatten().copied().collect();
        let sizes: Vec<u64> = sets.iter().map(|s| s.len() as u64).collect();
        Self::build_runs(&keys, &sizes, r, DEFAULT_D, seed)
    }

    fn env(&self) -> Env<'_> {
        Env {
            words: self.payload.words(),
            store: &self.store,
            d: self.d,
            c: self.c,
            nstar: self.n,
        }
    }

    pub fn key_bits(&self) -> u32 {
        self.r
    }

    /// Total number of keys over all sets.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn store(&self) -> &SharedFunctionStore {
        &self.store
    }

    pub fn payload_bits(&self) -> u64 {
        self.payload.len() as u64
    }

    /// Whether a set of `n_i` keys is stored bucketed.
    pub fn set_is_bucketed(&self, n_i: u64) -> bool {
        is_bucketed(n_i, self.d, self.c)
    }

    /// Rank of `x` inside the set whose keys occupy global indices
    /// `start..start+len`.
    #[inline]
    pub fn rank_in(&self, start: u64, len: u64, x: u64) -> i64 {
        if len == 0 {
            return -1;
        }
        let pos = (start * self.r as u64) as usize;
        if is_bucketed(len, self.d, self.c) {
            self.env().rank(pos, len, self.r, start, x)
        } else {
            explicit_rank(self.payload.words(), pos, len, self.r, x)
        }
    }

    /// `i`-th smallest key (`1 ≤ i ≤ len`) of the set at `start..start+len`.
    #[inline]
    pub fn select_in(&self, start: u64, len: u64, i: u64) -> u64 {
        let pos = (start * self.r as u64) as usize;
        if is_bucketed(len, self.d, self.c) {
            self.env().select(pos, len, self.r, start, i)
        } else {
            explicit_get(self.payload.words(), pos, i - 1, self.r)
        }
    }
}

impl Persist for DictCollection {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "r", self.r as u64);
        parts.field(prefix, "n", self.n);
        parts.field(prefix, "d", self.d);
        parts.field(prefix, "c", self.c as u64);
        self.store
            .write_parts(parts, &crate::parts::join(prefix, "store"));
        parts.section(prefix, "payload", self.payload.clone());
    }

    fn read_parts(rd: &mut PartsReader<'_>) -> Result<Self> {
        let r = rd.field_at_most(63)? as u32;
        let n = rd.field()?;
        let d = rd.field()?;
        let c = rd.field_at_most(64)? as u32;
        if d == 0 {
            return Err(Error::Corrupt("base-case threshold is zero".into()));
        }
        let store = SharedFunctionStore::read_parts(rd)?;
        let payload = rd.section_len(n * r as u64)?.clone();
        Ok(Self {
            r,
            n,
            d,
            c,
            payload,
            store,
        })
    }

    fn size_bits(&self) -> u64 {
        self.payload.len() as u64 + self.store.size_bits()
    }
}

/// A collection bundled with the prefix sums of its set sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedCollection {
    sizes: SearchablePrefixSum,
    sets: DictCollection,
}

impl IndexedCollection {
    pub fn build(sets: &[Vec<u64>], r: u32, seed: u64) -> Result<Self> {
        let sizes: Vec<u64> = sets.iter().map(|s| s.len() as u64).collect();
        Ok(Self {
            sizes: SearchablePrefixSum::build_with(&sizes, BackingKind::Auto),
            sets: DictCollection::build(sets, r, seed)?,
        })
    }

    pub fn num_sets(&self) -> u64 {
        self.sizes.len()
    }

    pub fn collection(&self) -> &DictCollection {
        &self.sets
    }

    fn bounds(&self, i: u64) -> Result<(u64, u64)> {
        if i >= self.num_sets() {
            return out_of_range("set index", i, format!("0..{}", self.num_sets()));
        }
        let st = self.sizes.sum_unchecked(i);
        Ok((st, self.sizes.sum_unchecked(i + 1) - st))
    }

    pub fn set_len(&self, i: u64) -> Result<u64> {
        Ok(self.bounds(i)?.1)
    }

    /// Rank of `x` in set `i` (0-based), −1 if absent.
    pub fn collection_rank(&self, i: u64, x: u64) -> Result<i64> {
        let (st, len) = self.bounds(i)?;
        if x >> self.sets.key_bits() != 0 {
            return out_of_range("key", x, format!("0..2^{}", self.sets.key_bits()));
        }
        Ok(self.sets.rank_in(st, len, x))
    }

    /// `j`-th smallest key of set `i`.
    pub fn collection_select(&self, i: u64, j: u64) -> Result<u64> {
        let (st, len) = self.bounds(i)?;
        if j == 0 || j > len {
            return out_of_range("select rank", j, format!("1..={len}"));
        }
        Ok(self.sets.select_in(st, len, j))
    }

    pub fn size_bits(&self) -> u64 {
        self.sizes.size_bits() + Persist::size_bits(&self.sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashkit::mix64;

    #[test]
    fn two_singletons() {
        let c = IndexedCollection::build(&[vec![5], vec![9]], 4, 1).unwrap();
        assert_eq!(c.collection_rank(1, 9).unwrap(), 0);
        assert_eq!(c.collection_rank(0, 9).unwrap(), -1);
        assert_eq!(c.collection_select(0, 1).unwrap(), 5);
        assert!(c.collection_rank(2, 0).is_err());
    }

    #[test]
    fn empty_member_set() {
        let c = IndexedCollection::build(&[vec![1, 2], vec![], vec![3]], 4, 1).unwrap();
        assert!((0..16).all(|x| c.collection_rank(1, x).unwrap() == -1));
        assert!(c.collection_select(1, 1).is_err());
    }

    #[test]
    fn random_sets_with_large_members() {
        let r = 16;
        let mut x = 42u64;
        let mut sets = Vec::new();
        for k in 0..8 {
            let size = if k == 3 { 3000 } else { 1 << k };
            let mut s: Vec<u64> = (0..size)
                .map(|_| {
                    x = mix64(x);
                    x & 0xFFFF
                })
                .collect();
            s.sort_unstable();
            s.dedup();
            sets.push(s);
        }
        let c = IndexedCollection::build(&sets, r, 3).unwrap();
        assert!(c.collection().set_is_bucketed(sets[3].len() as u64) || c.collection().c() > 3);
        assert_eq!(
            c.collection().payload_bits(),
            c.collection().len() * r as u64
        );
        for (i, s) in sets.iter().enumerate() {
            for (j, &k) in s.iter().enumerate() {
                assert_eq!(c.collection_select(i as u64, j as u64 + 1).unwrap(), k);
            }
            for _ in 0..2000 {
                x = mix64(x);
                let y = x & 0xFFFF;
                let expect = s.binary_search(&y).map(|p| p as i64).unwrap_or(-1);
                assert_eq!(c.collection_rank(i as u64, y).unwrap(), expect);
            }
        }
        let coll = c.collection();
        assert_eq!(&DictCollection::from_parts(&coll.to_parts()).unwrap(), coll);
    }
}
