//! Leaf dictionaries for small sets of `r`-bit keys.
//!
//! A leaf with `l ≤ √lg n*` keys is packed: the `h` values of its keys in
//! sorted key order, then their `q` values, `l·r` bits in all. Larger leaves
//! are hashed: a minimal perfect hash on the `h` values, a table `R` mapping
//! hash slots to ranks and the sorted keys `X`.

use crate::bitcore::bits::{ceil_lg, floor_lg, low_mask, read_bits, BitVector, Bits};
use crate::error::{Error, Result};
use crate::hashkit::mphf::{Mphf, MphfView};
use crate::hashkit::{make_quotient_pair, mix3, QuotientPair, SharedFunctionStore, StoreBuilder};
use crate::parts::{Parts, PartsReader, Persist};

const LEAF_SEED_TAG: u64 = 0x1EAF;

/// `⌊√⌊lg n*⌋⌋`, the largest packed leaf size.
pub fn packed_limit(nstar: u64) -> u64 {
    (floor_lg(nstar) as u64).isqrt()
}

pub fn is_packed(l: u64, nstar: u64) -> bool {
    l <= packed_limit(nstar)
}

/// Seed of the perfect hash inside the leaf numbered `global`.
pub fn leaf_seed(store_seed: u64, global: u64) -> u64 {
    mix3(store_seed, global, LEAF_SEED_TAG)
}

/// Encodes sorted distinct `keys ⊆ [2^r]` with the pair `pair`.
pub fn encode_leaf(
    keys: &[u64],
    r: u32,
    nstar: u64,
    pair: &QuotientPair,
    seed: u64,
) -> Result<BitVector> {
    let l = keys.len() as u64;
    let mut out = BitVector::new();
    if is_packed(l, nstar) {
        for &x in keys {
            out.push_bits(pair.h(x), pair.h_bits());
        }
        for &x in keys {
            out.push_bits(pair.q(x), pair.q_bits());
        }
        return Ok(out);
    }
    let hs: Vec<u64> = keys.iter().map(|&x| pair.h(x)).collect();
    let f = Mphf::build(&hs, seed)?;
    out.append(f.bits());
    let w = ceil_lg(l);
    let mut table = vec![0u64; keys.len()];
    for (i, &h) in hs.iter().enumerate() {
        table[f.eval(h) as usize] = i as u64;
    }
    for &v in &table {
        out.push_bits(v, w);
    }
    for &x in keys {
        out.push_bits(x, r);
    }
    Ok(out)
}

/// Finds the pair for `keys` and encodes the leaf; returns the bits and the
/// attempt number to record in the shared store.
pub fn plan_leaf(
    keys: &[u64],
    r: u32,
    nstar: u64,
    store_seed: u64,
    global: u64,
) -> Result<(BitVector, u32)> {
    let (pair, attempt) = make_quotient_pair(keys, r, store_seed)?;
    let bits = encode_leaf(keys, r, nstar, &pair, leaf_seed(store_seed, global))?;
    Ok((bits, attempt))
}

/// Leaf read in place.
#[derive(Clone, Copy, Debug)]
pub struct LeafView<'a> {
    words: &'a [u64],
    start: usize,
    l: u64,
    r: u32,
    pair: QuotientPair,
    mphf: Option<MphfView<'a>>,
    table_off: usize,
    keys_off: usize,
}

impl<'a> LeafView<'a> {
    pub fn new(bits: Bits<'a>, l: u64, r: u32, nstar: u64, pair: QuotientPair, seed: u64) -> Self {
        let (words, start) = bits.raw_parts();
        if is_packed(l, nstar) {
            return Self {
                words,
                start,
                l,
                r,
                pair,
                mphf: None,
                table_off: 0,
                keys_off: 0,
            };
        }
        let mphf = MphfView::new(bits, l, seed);
        let table_off = start + mphf.size_bits() as usize;
        let keys_off = table_off + (l * ceil_lg(l) as u64) as usize;
        Self {
            words,
            start,
            l,
            r,
            pair,
            mphf: Some(mphf),
            table_off,
            keys_off,
        }
    }

    /// Encoded length in bits.
    pub fn size_bits(&self) -> u64 {
        match self.mphf {
            None => self.l * self.r as u64,
            Some(_) => (self.keys_off - self.start) as u64 + self.l * self.r as u64,
        }
    }

    pub fn len(&self) -> u64 {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    /// 0-based rank of `x`, or −1 if absent.
    #[inline]
    pub fn rank(&self, x: u64) -> i64 {
        if self.l == 0 {
            return -1;
        }
        match self.mphf {
            Some(f) => {
                let slot = f.eval(self.pair.h(x));
                let w = ceil_lg(self.l);
                let j = read_bits(self.words, self.table_off + (slot * w as u64) as usize, w);
                if j < self.l && self.key(j) == x {
                    j as i64
                } else {
                    -1
                }
            }
            None => self.packed_rank(x),
        }
    }

    fn packed_rank(&self, x: u64) -> i64 {
        let b = self.pair.h_bits();
        let hx = self.pair.h(x);
        let k = if b == 0 {
            0
        } else {
            // All h fields fit in one word; find the field equal to h(x).
            let fields = read_bits(self.words, self.start, (self.l * b as u64) as u32);
            let ones = repeat_low(b, self.l);
            let highs = ones << (b - 1);
            let diff = fields ^ hx.wrapping_mul(ones);
            let carry = (diff & !highs).wrapping_add(!highs & low_mask((self.l * b as u64) as u32));
            let zero_fields = !(carry | diff) & highs;
            if zero_fields == 0 {
                return -1;
            }
            (zero_fields.trailing_zeros() / b) as u64
        };
        let qb = self.pair.q_bits();
        let q = read_bits(self.words, self.q_pos(k), qb);
        if q == self.pair.q(x) {
            k as i64
        } else {
            -1
        }
    }

    #[inline]
    fn q_pos(&self, k: u64) -> usize {
        self.start + (self.l * self.pair.h_bits() as u64 + k * self.pair.q_bits() as u64) as usize
    }

    #[inline]
    fn key(&self, j: u64) -> u64 {
        read_bits(
            self.words,
            self.keys_off + (j * self.r as u64) as usize,
            self.r,
        )
    }

    /// `i`-th smallest key, `1 ≤ i ≤ l`.
    #[inline]
    pub fn select(&self, i: u64) -> u64 {
        debug_assert!(i >= 1 && i <= self.l);
        match self.mphf {
            Some(_) => self.key(i - 1),
            None => {
                let b = self.pair.h_bits();
                let h = read_bits(self.words, self.start + ((i - 1) * b as u64) as usize, b);
                let q = read_bits(self.words, self.q_pos(i - 1), self.pair.q_bits());
                self.pair.reconstruct(h, q)
            }
        }
    }
}

/// Checks that `keys` is strictly increasing inside `[2^r]`.
pub fn check_keys(keys: &[u64], r: u32) -> Result<()> {
    if r < 64 {
        if let Some(&x) = keys.iter().find(|&&x| x >> r != 0) {
            return Err(Error::InvalidInput(format!(
                "key {x} does not fit in {r} bits"
            )));
        }
    }
    if let Some(i) = (1..keys.len()).find(|&i| keys[i - 1] >= keys[i]) {
        return Err(Error::InvalidInput(format!(
            "keys not strictly increasing at index {i}"
        )));
    }
    Ok(())
}

/// `1 + 2^b + 2^{2b} + …` with `count` terms.
#[inline]
fn repeat_low(b: u32, count: u64) -> u64 {
    let mut v = 0u64;
    for k in 0..count {
        v |= 1 << (k * b as u64);
    }
    v
}

/// Stand-alone leaf dictionary with its own single-entry store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafDict {
    r: u32,
    nstar: u64,
    l: u64,
    store: SharedFunctionStore,
    bits: BitVector,
}

impl LeafDict {
    /// `keys` sorted and distinct in `[2^r]`; `nstar ≥ |keys|`.
    pub fn build(keys: &[u64], r: u32, nstar: u64, seed: u64) -> Result<Self> {
        if r > 64 {
            return Err(Error::InvalidInput(format!("key width {r} exceeds 64")));
        }
        check_keys(keys, r)?;
        let l = keys.len() as u64;
        if l > nstar {
            return Err(Error::InvalidInput(format!(
                "leaf of {l} keys exceeds n* = {nstar}"
            )));
        }
        let mut sb = StoreBuilder::new(seed);
        let (bits, attempt) = plan_leaf(keys, r, nstar, seed, 0)?;
        sb.insert(0, attempt);
        Ok(Self {
            r,
            nstar,
            l,
            store: sb.finish()?,
            bits,
        })
    }

    pub fn view(&self) -> LeafView<'_> {
        let pair = self.store.pair(0, self.l, self.r);
        LeafView::new(
            self.bits.view(),
            self.l,
            self.r,
            self.nstar,
            pair,
            leaf_seed(self.store.seed(), 0),
        )
    }

    pub fn is_packed(&self) -> bool {
        is_packed(self.l, self.nstar)
    }

    pub fn len(&self) -> u64 {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn pair(&self) -> QuotientPair {
        self.store.pair(0, self.l, self.r)
    }

    pub fn rank(&self, x: u64) -> Result<i64> {
        if self.r < 64 && x >> self.r != 0 {
            return crate::error::out_of_range("key", x, format!("0..2^{}", self.r));
        }
        Ok(self.view().rank(x))
    }

    pub fn select(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.l {
            return crate::error::out_of_range("select rank", i, format!("1..={}", self.l));
        }
        Ok(self.view().select(i))
    }

    /// Leaf encoding bits (excluding the store).
    pub fn payload_bits(&self) -> u64 {
        self.bits.len() as u64
    }
}

impl Persist for LeafDict {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "r", self.r as u64);
        parts.field(prefix, "nstar", self.nstar);
        parts.field(prefix, "l", self.l);
        self.store
            .write_parts(parts, &crate::parts::join(prefix, "store"));
        parts.section(prefix, "leaf", self.bits.clone());
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let width = r.field_at_most(64)? as u32;
        let nstar = r.field()?;
        let l = r.field_at_most(nstar)?;
        let store = SharedFunctionStore::read_parts(r)?;
        let bits = r.section()?.clone();
        let d = Self {
            r: width,
            nstar,
            l,
            store,
            bits,
        };
        if d.store.len() != 1 || d.view().size_bits() != d.bits.len() as u64 {
            return Err(Error::Corrupt("leaf encoding has wrong length".into()));
        }
        Ok(d)
    }

    fn size_bits(&self) -> u64 {
        self.bits.len() as u64 + self.store.size_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_rank(keys: &[u64], x: u64) -> i64 {
        keys.binary_search(&x).map(|i| i as i64).unwrap_or(-1)
    }

    #[test]
    fn small_leaf_examples() {
        for nstar in [4u64, 1 << 20, 1 << 40] {
            let d = LeafDict::build(&[4, 9, 12], 8, nstar, 3).unwrap();
            assert_eq!(d.rank(9).unwrap(), 1);
            assert_eq!(d.rank(5).unwrap(), -1);
            assert_eq!(d.select(1).unwrap(), 4);
            assert_eq!(d.select(3).unwrap(), 12);
            assert!(d.select(4).is_err());
        }
        let e = LeafDict::build(&[], 8, 16, 0).unwrap();
        assert!((0..256).all(|x| e.rank(x).unwrap() == -1));
        let s = LeafDict::build(&[77], 8, 1 << 16, 0).unwrap();
        assert_eq!(s.select(1).unwrap(), 77);
        assert_eq!(s.rank(77).unwrap(), 0);
    }

    #[test]
    fn packed_and_hashed_agree_with_oracle() {
        let mut x = 0xDEADBEEFu64;
        for l in 0..60u64 {
            for nstar in [1u64 << 9, 1 << 36, 1 << 63] {
                let r = 12;
                let mut keys: Vec<u64> = (0..l)
                    .map(|_| {
                        x = crate::hashkit::mix64(x);
                        x & low_mask(r)
                    })
                    .collect();
                keys.sort_unstable();
                keys.dedup();
                if keys.len() as u64 > nstar {
                    continue;
                }
                let d = LeafDict::build(&keys, r, nstar, l).unwrap();
                assert_eq!(d.is_packed(), keys.len() as u64 <= packed_limit(nstar));
                for y in 0..(1u64 << r) {
                    assert_eq!(d.rank(y).unwrap(), oracle_rank(&keys, y), "l={l} y={y}");
                }
                for (i, &k) in keys.iter().enumerate() {
                    assert_eq!(d.select(i as u64 + 1).unwrap(), k);
                }
                assert_eq!(LeafDict::from_parts(&d.to_parts()).unwrap(), d);
            }
        }
    }

    #[test]
    fn full_small_range() {
        let keys: Vec<u64> = (0..16).collect();
        let d = LeafDict::build(&keys, 4, 1 << 20, 1).unwrap();
        for k in 0..16 {
            assert_eq!(d.rank(k).unwrap(), k as i64);
            assert_eq!(d.select(k + 1).unwrap(), k);
        }
    }

    #[test]
    fn wide_keys() {
        let keys = [0u64, 1 << 40, u64::MAX - 5, u64::MAX];
        let d = LeafDict::build(&keys, 64, 1 << 50, 9).unwrap();
        for (i, &k) in keys.iter().enumerate() {
            assert_eq!(d.rank(k).unwrap(), i as i64);
            assert_eq!(d.select(i as u64 + 1).unwrap(), k);
        }
        assert_eq!(d.rank(12345).unwrap(), -1);
    }
}
