//! Elias-Fano coding of a non-decreasing integer sequence.

use crate::bitcore::bits::{floor_lg, BitReader, BitVector, IntVector};
use crate::error::{Error, Result};
use crate::parts::{join, Parts, PartsReader};
use crate::rankselect::{Fid, RsDirectory};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliasFano {
    len: u64,
    bound: u64,
    low_width: u32,
    low: IntVector,
    high: RsDirectory,
}

impl EliasFano {
    /// Encodes `values`, each `< bound`, non-decreasing.
    pub fn new(values: &[u64], bound: u64) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(values.iter().all(|&v| v < bound.max(1)));
        let len = values.len() as u64;
        let low_width = Self::low_width_for(len, bound);
        let high_len = len + ((bound.max(1) - 1) >> low_width) + 1;
        let mut high = BitVector::zeros(high_len as usize);
        let mut low = IntVector::new(low_width);
        for (i, &v) in values.iter().enumerate() {
            high.set(((v >> low_width) + i as u64) as usize, true);
            low.push(v & crate::bitcore::bits::low_mask(low_width));
        }
        Self {
            len,
            bound,
            low_width,
            low,
            high: RsDirectory::from_bitvector(&high),
        }
    }

    fn low_width_for(len: u64, bound: u64) -> u32 {
        if len == 0 || bound <= len {
            0
        } else {
            floor_lg(bound / len)
        }
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Zero-based access.
    #[inline]
    pub fn get(&self, i: u64) -> u64 {
        debug_assert!(i < self.len);
        let hi = self.high.select1_unchecked(i + 1) - i;
        (hi << self.low_width) | self.low.get(i as usize)
    }

    pub fn size_bits(&self) -> u64 {
        self.low.size_bits() as u64 + self.high.total_bits()
    }

    pub fn write_sections(&self, parts: &mut Parts, prefix: &str) {
        parts.section(prefix, "low", self.low.bits().clone());
        self.high.write_sections(parts, &join(prefix, "high"));
    }

    pub fn read_sections(r: &mut PartsReader<'_>, len: u64, bound: u64) -> Result<Self> {
        let low_width = Self::low_width_for(len, bound);
        let low_bits = r.section_len(len * low_width as u64)?;
        let low = BitReader::new(low_bits).read_ints(len as usize, low_width)?;
        let high_len = len + ((bound.max(1) - 1) >> low_width) + 1;
        let high = RsDirectory::read_sections(r, high_len, len)?;
        let ef = Self {
            len,
            bound,
            low_width,
            low,
            high,
        };
        for i in 0..len {
            let v = ef.get(i);
            if v >= bound.max(1) || (i > 0 && v < ef.get(i - 1)) {
                return Err(Error::Corrupt("Elias-Fano sequence out of order".into()));
            }
        }
        Ok(ef)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parts::Parts;

    #[test]
    fn round_trip() {
        for (vals, bound) in [
            (vec![], 10u64),
            (vec![0, 0, 0], 1),
            (vec![3, 3, 7, 100, 100, 511], 512),
            ((0..1000).map(|i| i * i).collect::<Vec<u64>>(), 1_000_000),
        ] {
            let ef = EliasFano::new(&vals, bound);
            let got: Vec<u64> = (0..ef.len()).map(|i| ef.get(i)).collect();
            assert_eq!(got, vals);
            let mut parts = Parts::new();
            ef.write_sections(&mut parts, "c");
            let back =
                EliasFano::read_sections(&mut parts.reader(), vals.len() as u64, bound).unwrap();
            assert_eq!(back, ef);
        }
    }
}
