//! Minimal perfect hashing by bucketed pilot search.
//!
//! Keys are hashed into `⌈l/λ⌉` buckets. Buckets are placed largest first:
//! each gets the smallest pilot that sends all its keys to free slots of a
//! table of `l' ≥ l` slots. Slots `≥ l` that end up occupied are remapped to
//! the free slots below `l`.
//!
//! Encoding: `[attempt:8 | pilot width:6 | pilots | remap]`, where the remap
//! array holds one `⌈lg l⌉`-bit entry per slot in `[l, l')`. The shape follows
//! from `l`, so the description can be read in place.

use super::{mix64, reduce};
use crate::bitcore::bits::{bits_for, ceil_lg, read_bits, BitVector, Bits};
use crate::error::{Error, Result};

const LAMBDA: f64 = 4.0;
const ALPHA: f64 = 0.97;
const ATTEMPT_BITS: u32 = 8;
const PILOT_WIDTH_BITS: u32 = 6;
const MAX_PILOT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MphfShape {
    pub l: u64,
    pub buckets: u64,
    pub slots: u64,
    pub remap_width: u32,
}

impl MphfShape {
    pub fn new(l: u64) -> Self {
        let buckets = ((l as f64 / LAMBDA).ceil() as u64).max(1);
        let slots = ((l as f64 / ALPHA).ceil() as u64).max(l).max(1);
        Self {
            l,
            buckets,
            slots,
            remap_width: ceil_lg(l),
        }
    }

    fn bits(&self, pilot_width: u32) -> u64 {
        (ATTEMPT_BITS + PILOT_WIDTH_BITS) as u64
            + self.buckets * pilot_width as u64
            + (self.slots - self.l) * self.remap_width as u64
    }
}

#[inline]
fn key_hash(key: u64, seed: u64, attempt: u64) -> u64 {
    mix64(key ^ mix64(seed.wrapping_add(attempt.wrapping_mul(0xA076_1D64_78BD_642F))))
}

#[inline]
fn slot_of(hash: u64, pilot: u64, slots: u64) -> u64 {
    reduce(
        mix64(hash ^ mix64(pilot.wrapping_add(0xE703_7ED1_A0B4_28DB))),
        slots,
    )
}

/// Owned minimal perfect hash function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mphf {
    shape: MphfShape,
    seed: u64,
    bits: BitVector,
}

impl Mphf {
    /// Builds an MPHF for distinct `keys`; `seed` must be reused for lookups.
    pub fn build(keys: &[u64], seed: u64) -> Result<Self> {
        let shape = MphfShape::new(keys.len() as u64);
        if keys.is_empty() {
            let mut bits = BitVector::new();
            bits.push_bits(0, ATTEMPT_BITS + PILOT_WIDTH_BITS);
            return Ok(Self { shape, seed, bits });
        }
        for attempt in 0..(1u64 << ATTEMPT_BITS) {
            if let Some(bits) = try_build(keys, &shape, seed, attempt)? {
                return Ok(Self { shape, seed, bits });
            }
        }
        Err(Error::Construction(format!(
            "minimal perfect hash for {} keys failed after all attempts",
            keys.len()
        )))
    }

    pub fn len(&self) -> u64 {
        self.shape.l
    }

    pub fn is_empty(&self) -> bool {
        self.shape.l == 0
    }

    pub fn size_bits(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn view(&self) -> MphfView<'_> {
        MphfView::new(self.bits.view(), self.shape.l, self.seed)
    }

    #[inline]
    pub fn eval(&self, key: u64) -> u64 {
        self.view().eval(key)
    }

    /// Rebuilds from an encoding, checking its shape.
    pub fn from_bits(bits: BitVector, l: u64, seed: u64) -> Result<Self> {
        let shape = MphfShape::new(l);
        let len = encoded_len(bits.view(), l)?;
        if len != bits.len() as u64 {
            return Err(Error::Corrupt(
                "perfect hash encoding has wrong length".into(),
            ));
        }
        Ok(Self { shape, seed, bits })
    }
}

/// Length in bits of the encoding at the start of `bits` for `l` keys.
pub fn encoded_len(bits: Bits<'_>, l: u64) -> Result<u64> {
    if bits.len() < (ATTEMPT_BITS + PILOT_WIDTH_BITS) as usize {
        return Err(Error::Corrupt("perfect hash header truncated".into()));
    }
    let pw = bits.get_bits(ATTEMPT_BITS as usize, PILOT_WIDTH_BITS) as u32;
    if l == 0 {
        return Ok((ATTEMPT_BITS + PILOT_WIDTH_BITS) as u64);
    }
    Ok(MphfShape::new(l).bits(pw))
}

fn try_build(
    keys: &[u64],
    shape: &MphfShape,
    seed: u64,
    attempt: u64,
) -> Result<Option<BitVector>> {
    let hashes: Vec<u64> = keys.iter().map(|&k| key_hash(k, seed, attempt)).collect();
    let mut members: Vec<Vec<u64>> = vec![Vec::new(); shape.buckets as usize];
    for &h in &hashes {
        members[reduce(h, shape.buckets) as usize].push(h);
    }
    for m in &members {
        let mut s = m.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            // Distinct keys collided on the full hash: retry with a new attempt.
            return Ok(None);
        }
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&b| (std::cmp::Reverse(members[b].len()), b));
    let mut taken = vec![false; shape.slots as usize];
    let mut pilots = vec![0u64; shape.buckets as usize];
    let mut slots_buf = Vec::new();
    for &b in &order {
        if members[b].is_empty() {
            break;
        }
        let mut found = false;
        for pilot in 0..MAX_PILOT {
            slots_buf.clear();
            let mut ok = true;
            for &h in &members[b] {
                let s = slot_of(h, pilot, shape.slots);
                if taken[s as usize] || slots_buf.contains(&s) {
                    ok = false;
                    break;
                }
                slots_buf.push(s);
            }
            if ok {
                for &s in &slots_buf {
                    taken[s as usize] = true;
                }
                pilots[b] = pilot;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(None);
        }
    }
    let pw = bits_for(pilots.iter().copied().max().unwrap_or(0));
    let mut bits = BitVector::with_capacity(shape.bits(pw) as usize);
    bits.push_bits(attempt, ATTEMPT_BITS);
    bits.push_bits(pw as u64, PILOT_WIDTH_BITS);
    for &p in &pilots {
        bits.push_bits(p, pw);
    }
    let mut free = (0..shape.l).filter(|&s| !taken[s as usize]);
    for s in shape.l..shape.slots {
        let target = if taken[s as usize] {
            free.next()
                .expect("one free slot per occupied overflow slot")
        } else {
            0
        };
        bits.push_bits(target, shape.remap_width);
    }
    debug_assert_eq!(bits.len() as u64, shape.bits(pw));
    Ok(Some(bits))
}

/// Borrowed MPHF description.
#[derive(Clone, Copy, Debug)]
pub struct MphfView<'a> {
    words: &'a [u64],
    start: usize,
    shape: MphfShape,
    seed: u64,
    attempt: u64,
    pw: u32,
}

impl<'a> MphfView<'a> {
    pub fn new(bits: Bits<'a>, l: u64, seed: u64) -> Self {
        let (words, start) = bits.raw_parts();
        let attempt = read_bits(words, start, ATTEMPT_BITS);
        let pw = read_bits(words, start + ATTEMPT_BITS as usize, PILOT_WIDTH_BITS) as u32;
        Self {
            words,
            start,
            shape: MphfShape::new(l),
            seed,
            attempt,
            pw,
        }
    }

    pub fn size_bits(&self) -> u64 {
        self.shape.bits(self.pw)
    }

    /// Slot in `[0, l)`; arbitrary (but in range) for keys outside the set.
    #[inline]
    pub fn eval(&self, key: u64) -> u64 {
        if self.shape.l <= 1 {
            return 0;
        }
        let h = key_hash(key, self.seed, self.attempt);
        let b = reduce(h, self.shape.buckets);
        let base = self.start + (ATTEMPT_BITS + PILOT_WIDTH_BITS) as usize;
        let pilot = read_bits(self.words, base + (b * self.pw as u64) as usize, self.pw);
        let s = slot_of(h, pilot, self.shape.slots);
        if s < self.shape.l {
            return s;
        }
        let remap = base + (self.shape.buckets * self.pw as u64) as usize;
        let w = self.shape.remap_width;
        read_bits(
            self.words,
            remap + ((s - self.shape.l) * w as u64) as usize,
            w,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(keys: &[u64], seed: u64) -> Mphf {
        let f = Mphf::build(keys, seed).unwrap();
        let mut seen = vec![false; keys.len()];
        for &k in keys {
            let v = f.eval(k) as usize;
            assert!(v < keys.len());
            assert!(!seen[v], "collision at {v}");
            seen[v] = true;
        }
        f
    }

    #[test]
    fn small_sets() {
        assert_eq!(check(&[42], 0).eval(42), 0);
        let f = check(&[10, 20, 30], 5);
        let mut img: Vec<u64> = [10, 20, 30].iter().map(|&k| f.eval(k)).collect();
        img.sort();
        assert_eq!(img, vec![0, 1, 2]);
        check(&[], 1);
    }

    #[test]
    fn ten_thousand_random_keys() {
        let keys: Vec<u64> = (0..10_000u64).map(|i| mix64(i * 31 + 7)).collect();
        let f = check(&keys, 123);
        assert_eq!(keys.iter().map(|&k| f.eval(k)).max().unwrap(), 9_999);
        let per_key = f.size_bits() as f64 / keys.len() as f64;
        assert!(per_key < 4.0, "{per_key} bits per key");
    }

    #[test]
    fn many_leaf_sized_sets() {
        for l in 1..200u64 {
            let keys: Vec<u64> = (0..l).map(|i| i * i + 3 * l).collect();
            check(&keys, l);
        }
    }

    #[test]
    fn from_bits_checks_length() {
        let f = Mphf::build(&[1, 2, 3, 4, 5, 6, 7, 8, 9], 3).unwrap();
        assert_eq!(Mphf::from_bits(f.bits().clone(), 9, 3).unwrap(), f);
        let mut longer = f.bits().clone();
        longer.push(false);
        assert!(Mphf::from_bits(longer, 9, 3).is_err());
    }
}
