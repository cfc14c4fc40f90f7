//! Two-level MSB bucketing of `r`-bit keys.
//!
//! A set of `N > d` keys is split by its top `⌈lg N⌉` bits into `z = 2^⌈lg N⌉`
//! buckets of `t = r − ⌈lg N⌉`-bit keys. The bucket sizes are written in
//! unary with a rank/select directory, padded to `4N` bits. Bucket `i` then
//! starts `4N + ρ·(t+4+c)` bits in, `ρ` being the number of keys in earlier
//! buckets, and occupies exactly `n_i·(t+4+c)` bits:
//!
//! * `n_i ≤ d`: the keys in `t`-bit fields, padded;
//! * otherwise a second split by the top `⌈lg n_i⌉` bits, sizes padded to
//!   `4n_i` bits, and each part `T` at `4n_i + σ·(t+c)` in `|T|·(t+c)` bits,
//!   either explicit (`|T| ≤ d`) or a leaf dictionary.
//!
//! The whole set takes exactly `N·(t+8+c)` bits.

use crate::bitcore::bits::{ceil_lg, low_mask, read_bits, BitVector, Bits};
use crate::error::{out_of_range, Error, Result};
use crate::hashkit::{SharedFunctionStore, StoreBuilder};
use crate::parts::{Parts, PartsReader, Persist};
use crate::prefixsum::{unary_pred, unary_sum};
use crate::rankselect::{build_directory, RsLayout, RsView};

use super::leaf::{check_keys, leaf_seed, plan_leaf, LeafView};

/// Default base-case threshold.
pub const DEFAULT_D: u64 = 16;

/// `N·(t+8+c)`: the encoded length of a bucketed set of `n > d` keys.
pub fn bucketed_bits(n: u64, r: u32, c: u32) -> u64 {
    n * (r - ceil_lg(n) + 8 + c) as u64
}

/// Offsets `b` with bucket `i` holding `keys[b[i]..b[i+1]]`, bucket index
/// `(x & mask) >> shift`, `z` buckets.
fn split(keys: &[u64], mask: u64, shift: u32, z: u64) -> Vec<usize> {
    let mut b = vec![0usize; z as usize + 1];
    for &x in keys {
        b[((x & mask) >> shift) as usize + 1] += 1;
    }
    for i in 1..b.len() {
        b[i] += b[i - 1];
    }
    b
}

fn unary_sizes(bounds: &[usize]) -> BitVector {
    let mut bits = BitVector::with_capacity(bounds[bounds.len() - 1] + bounds.len());
    for w in bounds.windows(2) {
        bits.push_zeros(w[1] - w[0]);
        bits.push(true);
    }
    bits
}

fn pad_to(out: &mut BitVector, target: usize) -> Result<()> {
    if out.len() > target {
        return Err(Error::Construction(format!(
            "component overflows its padded slot by {} bits",
            out.len() - target
        )));
    }
    out.push_zeros(target - out.len());
    Ok(())
}

/// A hashed leaf encoded ahead of layout.
#[derive(Clone, Debug)]
pub(crate) struct PlannedLeaf {
    pub global: u64,
    pub attempt: u32,
    pub bits: BitVector,
}

/// Leaves of one set and the smallest `c` their padding allows.
#[derive(Clone, Debug)]
pub(crate) struct SetPlan {
    pub leaves: Vec<PlannedLeaf>,
    pub c_needed: u32,
}

/// Encodes the leaves of a set of `n > d` keys; `global_base` is the global
/// number of its first key.
pub(crate) fn plan(
    keys: &[u64],
    r: u32,
    d: u64,
    nstar: u64,
    seed: u64,
    global_base: u64,
) -> Result<SetPlan> {
    let n = keys.len() as u64;
    debug_assert!(n > d);
    let s1 = ceil_lg(n);
    let t = r - s1;
    let b1 = split(keys, u64::MAX, t, 1 << s1);
    let mut leaves = Vec::new();
    let mut c_needed = 0u32;
    for i in 0..(1usize << s1) {
        let si = &keys[b1[i]..b1[i + 1]];
        let ni = si.len() as u64;
        if ni <= d {
            continue;
        }
        let s2 = ceil_lg(ni);
        let r2 = t - s2;
        let b2 = split(si, low_mask(t), r2, 1 << s2);
        for j in 0..(1usize << s2) {
            let part = &si[b2[j]..b2[j + 1]];
            let len = part.len() as u64;
            if len <= d {
                continue;
            }
            let local: Vec<u64> = part.iter().map(|&x| x & low_mask(r2)).collect();
            let global = global_base + (b1[i] + b2[j]) as u64;
            let (bits, attempt) = plan_leaf(&local, r2, nstar, seed, global)?;
            let base = len * t as u64;
            let extra = (bits.len() as u64).saturating_sub(base);
            c_needed = c_needed.max(extra.div_ceil(len) as u32);
            leaves.push(PlannedLeaf {
                global,
                attempt,
                bits,
            });
        }
    }
    Ok(SetPlan { leaves, c_needed })
}

/// Appends the padded layout of a planned set; `c ≥ plan.c_needed`.
pub(crate) fn emit(
    keys: &[u64],
    r: u32,
    d: u64,
    c: u32,
    plan: &SetPlan,
    out: &mut BitVector,
) -> Result<()> {
    let start = out.len();
    let n = keys.len() as u64;
    let s1 = ceil_lg(n);
    let t = r - s1;
    let b1 = split(keys, u64::MAX, t, 1 << s1);
    out.append(&build_directory(&unary_sizes(&b1)));
    pad_to(out, start + 4 * n as usize)?;
    let outer = (t + 4 + c) as usize;
    let inner = (t + c) as usize;
    let mut leaves = plan.leaves.iter();
    for i in 0..(1usize << s1) {
        let si = &keys[b1[i]..b1[i + 1]];
        let ni = si.len();
        let gpos = start + 4 * n as usize + b1[i] * outer;
        debug_assert_eq!(out.len(), gpos);
        if ni as u64 <= d {
            for &x in si {
                out.push_bits(x & low_mask(t), t);
            }
            pad_to(out, gpos + ni * outer)?;
            continue;
        }
        let s2 = ceil_lg(ni as u64);
        let r2 = t - s2;
        let b2 = split(si, low_mask(t), r2, 1 << s2);
        out.append(&build_directory(&unary_sizes(&b2)));
        pad_to(out, gpos + 4 * ni)?;
        for j in 0..(1usize << s2) {
            let part = &si[b2[j]..b2[j + 1]];
            let tpos = gpos + 4 * ni + b2[j] * inner;
            debug_assert_eq!(out.len(), tpos);
            if part.len() as u64 <= d {
                for &x in part {
                    out.push_bits(x & low_mask(r2), r2);
                }
            } else {
                let leaf = leaves.next().expect("planned leaf per large part");
                out.append(&leaf.bits);
            }
            pad_to(out, tpos + part.len() * inner)?;
        }
        pad_to(out, gpos + ni * outer)?;
    }
    debug_assert!(leaves.next().is_none());
    debug_assert_eq!((out.len() - start) as u64, bucketed_bits(n, r, c));
    Ok(())
}

/// Index of `x` among `len` sorted `width`-bit fields at `pos`, or −1.
#[inline]
pub(crate) fn explicit_rank(words: &[u64], pos: usize, len: u64, width: u32, x: u64) -> i64 {
    let (mut lo, mut hi) = (0u64, len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let v = read_bits(words, pos + (mid * width as u64) as usize, width);
        if v < x {
            lo = mid + 1;
        } else if v > x {
            hi = mid;
        } else {
            return mid as i64;
        }
    }
    -1
}

#[inline]
pub(crate) fn explicit_get(words: &[u64], pos: usize, k: u64, width: u32) -> u64 {
    read_bits(words, pos + (k * width as u64) as usize, width)
}

/// Shared parameters of every set in one payload.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Env<'a> {
    pub words: &'a [u64],
    pub store: &'a SharedFunctionStore,
    pub d: u64,
    pub c: u32,
    pub nstar: u64,
}

impl<'a> Env<'a> {
    #[inline]
    fn psum(&self, pos: usize, n: u64, ones: u64) -> RsView<'a> {
        let total = RsLayout::new(n + ones, ones).total as usize;
        RsView::new(Bits::new(self.words, pos, total), n + ones, ones)
    }

    #[inline]
    fn leaf(&self, pos: usize, len: u64, r2: u32, global: u64) -> LeafView<'a> {
        let pair = self.store.pair(global, len, r2);
        let bits = Bits::new(self.words, pos, usize::MAX - pos);
        LeafView::new(
            bits,
            len,
            r2,
            self.nstar,
            pair,
            leaf_seed(self.store.seed(), global),
        )
    }

    /// Rank of `x` in the bucketed set of `n > d` `r`-bit keys at `pos`.
    pub fn rank(&self, pos: usize, n: u64, r: u32, global_base: u64, x: u64) -> i64 {
        let s1 = ceil_lg(n);
        let t = r - s1;
        let top = self.psum(pos, n, 1 << s1);
        let i = x >> t;
        let rho = unary_sum(&top, i);
        let ni = unary_sum(&top, i + 1) - rho;
        if ni == 0 {
            return -1;
        }
        let y = x & low_mask(t);
        let gpos = pos + (4 * n + rho * (t + 4 + self.c) as u64) as usize;
        let local = if ni <= self.d {
            explicit_rank(self.words, gpos, ni, t, y)
        } else {
            let s2 = ceil_lg(ni);
            let r2 = t - s2;
            let sec = self.psum(gpos, ni, 1 << s2);
            let j = y >> r2;
            let sigma = unary_sum(&sec, j);
            let len = unary_sum(&sec, j + 1) - sigma;
            if len == 0 {
                return -1;
            }
            let tpos = gpos + (4 * ni + sigma * (t + self.c) as u64) as usize;
            let yy = y & low_mask(r2);
            let k = if len <= self.d {
                explicit_rank(self.words, tpos, len, r2, yy)
            } else {
                self.leaf(tpos, len, r2, global_base + rho + sigma).rank(yy)
            };
            if k < 0 {
                return -1;
            }
            k + sigma as i64
        };
        if local < 0 {
            -1
        } else {
            local + rho as i64
        }
    }

    /// `i`-th smallest key (`1 ≤ i ≤ n`) of the bucketed set at `pos`.
    pub fn select(&self, pos: usize, n: u64, r: u32, global_base: u64, i: u64) -> u64 {
        let s1 = ceil_lg(n);
        let t = r - s1;
        let top = self.psum(pos, n, 1 << s1);
        let b = unary_pred(&top, i);
        let rho = unary_sum(&top, b);
        let ni = unary_sum(&top, b + 1) - rho;
        let k = i - rho;
        let gpos = pos + (4 * n + rho * (t + 4 + self.c) as u64) as usize;
        let low = if ni <= self.d {
            explicit_get(self.words, gpos, k - 1, t)
        } else {
            let s2 = ceil_lg(ni);
            let r2 = t - s2;
            let sec = self.psum(gpos, ni, 1 << s2);
            let j = unary_pred(&sec, k);
            let sigma = unary_sum(&sec, j);
            let len = unary_sum(&sec, j + 1) - sigma;
            let kk = k - sigma;
            let tpos = gpos + (4 * ni + sigma * (t + self.c) as u64) as usize;
            let v = if len <= self.d {
                explicit_get(self.words, tpos, kk - 1, r2)
            } else {
                self.leaf(tpos, len, r2, global_base + rho + sigma)
                    .select(kk)
            };
            (j << r2) | v
        };
        (b << t) | low
    }
}

/// Top-level statistics of a bucketed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketStats {
    pub top_sizes_bits: u64,
    pub buckets: u64,
    pub split_buckets: u64,
    pub leaves: u64,
}

/// Stand-alone two-level bucketed dictionary on `[m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketedDict {
    n: u64,
    m: u64,
    r: u32,
    d: u64,
    c: u32,
    payload: BitVector,
    store: SharedFunctionStore,
}

impl BucketedDict {
    pub fn build(keys: &[u64], m: u64, seed: u64) -> Result<Self> {
        Self::build_with(keys, m, DEFAULT_D, seed)
    }

    pub fn build_with(keys: &[u64], m: u64, d: u64, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput(
                "base-case threshold d must be at least 1".into(),
            ));
        }
        crate::rankselect::check_set(keys, m)?;
        let r = ceil_lg(m);
        let n = keys.len() as u64;
        let mut payload = BitVector::new();
        let mut sb = StoreBuilder::new(seed);
        let mut c = 0;
        if n <= d {
            for &x in keys {
                payload.push_bits(x, r);
            }
        } else {
            let p = plan(keys, r, d, n, seed, 0)?;
            c = p.c_needed;
            for leaf in &p.leaves {
                sb.insert(leaf.global, leaf.attempt);
            }
            emit(keys, r, d, c, &p, &mut payload)?;
        }
        Ok(Self {
            n,
            m,
            r,
            d,
            c,
            payload,
            store: sb.finish()?,
        })
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

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    /// The padding constant `c` realized by this build.
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// `t = ⌈lg m⌉ − ⌈lg n⌉`.
    pub fn t(&self) -> u32 {
        self.r - ceil_lg(self.n)
    }

    pub fn is_explicit(&self) -> bool {
        self.n <= self.d
    }

    /// Payload bits, excluding the shared store.
    pub fn payload_bits(&self) -> u64 {
        self.payload.len() as u64
    }

    /// `n(t+8+c)` for bucketed builds, `n⌈lg m⌉` for explicit ones.
    pub fn closed_form_bits(&self) -> u64 {
        if self.is_explicit() {
            self.n * self.r as u64
        } else {
            bucketed_bits(self.n, self.r, self.c)
        }
    }

    pub fn store(&self) -> &SharedFunctionStore {
        &self.store
    }

    pub fn payload(&self) -> &BitVector {
        &self.payload
    }

    /// Sizes of the top-level buckets (empty for explicit builds).
    pub fn top_level_sizes(&self) -> Vec<u64> {
        if self.is_explicit() {
            return Vec::new();
        }
        let z = 1u64 << ceil_lg(self.n);
        let top = self.env().psum(0, self.n, z);
        (0..z)
            .map(|i| unary_sum(&top, i + 1) - unary_sum(&top, i))
            .collect()
    }

    pub fn rank(&self, x: u64) -> Result<i64> {
        if x >= self.m {
            return out_of_range("key", x, format!("0..{}", self.m));
        }
        Ok(self.rank_unchecked(x))
    }

    pub fn rank_unchecked(&self, x: u64) -> i64 {
        if self.is_explicit() {
            explicit_rank(self.payload.words(), 0, self.n, self.r, x)
        } else {
            self.env().rank(0, self.n, self.r, 0, x)
        }
    }

    pub fn select(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.n {
            return out_of_range("select rank", i, format!("1..={}", self.n));
        }
        Ok(self.select_unchecked(i))
    }

    pub fn select_unchecked(&self, i: u64) -> u64 {
        if self.is_explicit() {
            explicit_get(self.payload.words(), 0, i - 1, self.r)
        } else {
            self.env().select(0, self.n, self.r, 0, i)
        }
    }

    pub fn to_keys(&self) -> Vec<u64> {
        (1..=self.n).map(|i| self.select_unchecked(i)).collect()
    }

    pub fn stats(&self) -> BucketStats {
        let sizes = self.top_level_sizes();
        BucketStats {
            top_sizes_bits: if self.is_explicit() { 0 } else { 4 * self.n },
            buckets: sizes.len() as u64,
            split_buckets: sizes.iter().filter(|&&s| s > self.d).count() as u64,
            leaves: self.store.len(),
        }
    }
}

impl Persist for BucketedDict {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "n", self.n);
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "d", self.d);
        parts.field(prefix, "c", self.c as u64);
        self.store
            .write_parts(parts, &crate::parts::join(prefix, "store"));
        parts.section(prefix, "payload", self.payload.clone());
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let n = r.field()?;
        let m = r.field()?;
        let d = r.field()?;
        let c = r.field_at_most(64)? as u32;
        if n > m || d == 0 {
            return Err(Error::Corrupt("bucketed dictionary shape invalid".into()));
        }
        let store = SharedFunctionStore::read_parts(r)?;
        let rbits = ceil_lg(m);
        let expect = if n <= d {
            n * rbits as u64
        } else {
            bucketed_bits(n, rbits, c)
        };
        let payload = r.section_len(expect)?.clone();
        let dict = Self {
            n,
            m,
            r: rbits,
            d,
            c,
            payload,
            store,
        };
        if n <= d {
            check_keys(&dict.to_keys(), rbits)?;
        }
        Ok(dict)
    }

    fn size_bits(&self) -> u64 {
        self.payload.len() as u64 + self.store.size_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashkit::mix64;

    fn random_set(n: usize, m: u64, seed: u64) -> Vec<u64> {
        let mut x = seed;
        let mut v: Vec<u64> = (0..n * 2)
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

    fn check(dict: &BucketedDict, keys: &[u64], probes: impl Iterator<Item = u64>) {
        for (i, &k) in keys.iter().enumerate() {
            assert_eq!(dict.select(i as u64 + 1).unwrap(), k, "select({})", i + 1);
            assert_eq!(dict.rank(k).unwrap(), i as i64);
        }
        for x in probes {
            let expect = keys.binary_search(&x).map(|i| i as i64).unwrap_or(-1);
            assert_eq!(dict.rank(x).unwrap(), expect, "rank({x})");
        }
    }

    #[test]
    fn top_level_partition_example() {
        let keys = [0x12, 0x15, 0x83, 0xF0];
        let d = BucketedDict::build_with(&keys, 256, 2, 1).unwrap();
        assert_eq!(d.top_level_sizes(), vec![2, 0, 1, 1]);
        check(&d, &keys, 0..256);
        assert_eq!(d.payload_bits(), bucketed_bits(4, 8, d.c()));
    }

    #[test]
    fn explicit_base_case_stores_input_fields() {
        let keys = [3u64, 9, 200, 1000];
        let d = BucketedDict::build(&keys, 1024, 0).unwrap();
        assert!(d.is_explicit());
        let mut expect = BitVector::new();
        for &k in &keys {
            expect.push_bits(k, 10);
        }
        assert_eq!(d.payload(), &expect);
        check(&d, &keys, 0..1024);
    }

    #[test]
    fn small_example_set() {
        let keys = [2u64, 3, 5, 7, 11, 13];
        for dd in [1, 2, 16] {
            let d = BucketedDict::build_with(&keys, 16, dd, 5).unwrap();
            assert_eq!(d.rank(7).unwrap(), 3);
            assert_eq!(d.select(5).unwrap(), 11);
            assert_eq!(d.rank(1).unwrap(), -1);
        }
    }

    #[test]
    fn identity_set() {
        let keys: Vec<u64> = (0..300).collect();
        let d = BucketedDict::build(&keys, 300, 2).unwrap();
        check(&d, &keys, 0..300);
    }

    #[test]
    fn random_sets_match_oracle_and_closed_form() {
        for (k, &(n, m)) in [
            (40usize, 1u64 << 12),
            (1000, 1 << 20),
            (5000, 1 << 32),
            (3000, 1 << 13),
        ]
        .iter()
        .enumerate()
        {
            let keys = random_set(n, m, k as u64 + 10);
            let d = BucketedDict::build(&keys, m, 99).unwrap();
            assert_eq!(d.payload_bits(), d.closed_form_bits());
            let mut x = 7u64;
            let probes = (0..5000).map(move |_| {
                x = mix64(x);
                x % m
            });
            check(&d, &keys, probes);
            assert_eq!(BucketedDict::from_parts(&d.to_parts()).unwrap(), d);
        }
    }

    #[test]
    fn clustered_keys_use_leaves() {
        // Many keys sharing their top bits force second-level splits and leaves.
        let mut keys: Vec<u64> = (0..2000u64).map(|i| (1 << 30) + i * 37).collect();
        keys.extend((0..50u64).map(|i| (3 << 30) + i));
        let d = BucketedDict::build_with(&keys, 1 << 32, 4, 3).unwrap();
        assert!(d.stats().leaves > 0);
        assert_eq!(
            d.payload_bits(),
            bucketed_bits(keys.len() as u64, 32, d.c())
        );
        let probes = keys.iter().map(|&k| k + 1).chain(0..100);
        check(&d, &keys, probes);
    }
}
