//! Hash parameters shared by many small sets.
//!
//! Every set uses a multiplier from the global table `multiplier(seed, ⌈lg l⌉,
//! attempt)`. The only per-set record is the attempt counter, found through
//! a minimal perfect hash over the sets' global numbers.

use super::mphf::Mphf;
use super::quotient::{h_width, multiplier, QuotientPair};
use crate::bitcore::bits::{bits_for, IntVector};
use crate::error::{Error, Result};
use crate::parts::{Parts, PartsReader, Persist};

#[derive(Clone, Debug, Default)]
pub struct StoreBuilder {
    seed: u64,
    records: Vec<(u64, u32)>,
}

impl StoreBuilder {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            records: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Picks the pair for `keys ⊆ [2^r]` and records its attempt under `global`.
    pub fn register(&mut self, global: u64, keys: &[u64], r: u32) -> Result<QuotientPair> {
        let (pair, attempt) = super::make_quotient_pair(keys, r, self.seed)?;
        self.records.push((global, attempt));
        Ok(pair)
    }

    /// Records an attempt found elsewhere (see [`super::make_quotient_pair`]).
    pub fn insert(&mut self, global: u64, attempt: u32) {
        self.records.push((global, attempt));
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn finish(mut self) -> Result<SharedFunctionStore> {
        self.records.sort_unstable();
        if self.records.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("set number registered twice".into()));
        }
        let keys: Vec<u64> = self.records.iter().map(|r| r.0).collect();
        let index = Mphf::build(&keys, self.seed)?;
        let width = bits_for(self.records.iter().map(|r| r.1 as u64).max().unwrap_or(0));
        let mut attempts = IntVector::with_len(keys.len(), width);
        for &(g, a) in &self.records {
            attempts.set(index.eval(g) as usize, a as u64);
        }
        Ok(SharedFunctionStore {
            seed: self.seed,
            index,
            attempts,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedFunctionStore {
    seed: u64,
    index: Mphf,
    attempts: IntVector,
}

impl SharedFunctionStore {
    pub fn empty(seed: u64) -> Self {
        StoreBuilder::new(seed).finish().expect("empty store")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of registered sets.
    pub fn len(&self) -> u64 {
        self.attempts.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.attempts.is_empty()
    }

    /// Attempt counter of a registered set.
    #[inline]
    pub fn attempt(&self, global: u64) -> u32 {
        if self.attempts.width() == 0 {
            return 0;
        }
        self.attempts.get(self.index.eval(global) as usize) as u32
    }

    /// Quotient pair of registered set `global` with `l` keys in `[2^r]`.
    #[inline]
    pub fn pair(&self, global: u64, l: u64, r: u32) -> QuotientPair {
        QuotientPair::new(
            r,
            h_width(l, r),
            multiplier(self.seed, l, self.attempt(global)),
        )
    }

    pub fn max_attempt(&self) -> u64 {
        self.attempts.iter().max().unwrap_or(0)
    }

    pub fn index_bits(&self) -> u64 {
        self.index.size_bits()
    }

    pub fn attempt_bits(&self) -> u64 {
        self.attempts.size_bits() as u64
    }

    pub fn size_bits(&self) -> u64 {
        self.index_bits() + self.attempt_bits()
    }
}

impl Persist for SharedFunctionStore {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "seed", self.seed);
        parts.field(prefix, "sets", self.len());
        parts.field(prefix, "attempt_width", self.attempts.width() as u64);
        parts.section(prefix, "index", self.index.bits().clone());
        parts.section(prefix, "attempts", self.attempts.bits().clone());
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let seed = r.field()?;
        let sets = r.field_at_most(u32::MAX as u64)?;
        let width = r.field_at_most(32)? as u32;
        let index = Mphf::from_bits(r.section()?.clone(), sets, seed)?;
        let raw = r.section_len(sets * width as u64)?;
        let mut attempts = IntVector::with_len(sets as usize, width);
        for i in 0..sets as usize {
            attempts.set(i, raw.get_bits(i * width as usize, width));
        }
        Ok(Self {
            seed,
            index,
            attempts,
        })
    }

    fn size_bits(&self) -> u64 {
        SharedFunctionStore::size_bits(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registered_pairs_are_recovered() {
        let mut b = StoreBuilder::new(77);
        let mut sets = Vec::new();
        for g in 0..300u64 {
            let l = 1 + g % 40;
            let keys: Vec<u64> = (0..l).map(|i| (i * 2654435761 + g) & 0xFFFFF).collect();
            let mut keys = keys;
            keys.sort_unstable();
            keys.dedup();
            let global = g * 1000 + 3;
            let p = b.register(global, &keys, 20).unwrap();
            sets.push((global, keys, p));
        }
        let store = b.finish().unwrap();
        assert_eq!(store.len(), 300);
        for (global, keys, p) in &sets {
            let q = store.pair(*global, keys.len() as u64, 20);
            assert_eq!(q, *p);
            assert!(q.is_injective_on(keys));
        }
        let back = SharedFunctionStore::from_parts(&store.to_parts()).unwrap();
        assert_eq!(back, store);
    }

    #[test]
    fn empty_store() {
        let s = SharedFunctionStore::empty(1);
        assert!(s.is_empty());
        assert_eq!(SharedFunctionStore::from_parts(&s.to_parts()).unwrap(), s);
    }
}
