//! Flattened serialization form shared by all structures.
//!
//! A structure is written as an ordered list of 64-bit header fields and an
//! ordered list of bit sections. Nested structures push their own fields and
//! sections under a dotted name prefix; readers consume them in the same
//! order. Names are not stored in files, only used for reports.

use crate::bitcore::BitVector;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Parts {
    pub fields: Vec<(String, u64)>,
    pub sections: Vec<(String, BitVector)>,
}

impl Parts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, prefix: &str, name: &str, value: u64) {
        self.fields.push((join(prefix, name), value));
    }

    pub fn section(&mut self, prefix: &str, name: &str, bits: BitVector) {
        self.sections.push((join(prefix, name), bits));
    }

    pub fn section_bits(&self) -> u64 {
        self.sections.iter().map(|(_, b)| b.len() as u64).sum()
    }

    pub fn header_bits(&self) -> u64 {
        64 * self.fields.len() as u64
    }

    pub fn reader(&self) -> PartsReader<'_> {
        PartsReader {
            parts: self,
            field: 0,
            section: 0,
        }
    }
}

pub fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

pub struct PartsReader<'a> {
    parts: &'a Parts,
    field: usize,
    section: usize,
}

impl<'a> PartsReader<'a> {
    pub fn field(&mut self) -> Result<u64> {
        let (_, v) = self
            .parts
            .fields
            .get(self.field)
            .ok_or_else(|| Error::Corrupt("missing header field".into()))?;
        self.field += 1;
        Ok(*v)
    }

    /// Reads a header field that must fit in a `usize`-sized or smaller quantity.
    pub fn field_at_most(&mut self, max: u64) -> Result<u64> {
        let v = self.field()?;
        if v > max {
            return Err(Error::Corrupt(format!("header field {v} exceeds {max}")));
        }
        Ok(v)
    }

    pub fn section(&mut self) -> Result<&'a BitVector> {
        let (_, b) = self
            .parts
            .sections
            .get(self.section)
            .ok_or_else(|| Error::Corrupt("missing section".into()))?;
        self.section += 1;
        Ok(b)
    }

    /// Reads a section whose length must equal `len`.
    pub fn section_len(&mut self, len: u64) -> Result<&'a BitVector> {
        let b = self.section()?;
        if b.len() as u64 != len {
            return Err(Error::Corrupt(format!(
                "section has {} bits, expected {len}",
                b.len()
            )));
        }
        Ok(b)
    }

    /// Consumes the fields and sections of `expected` that follow the first
    /// `fields_done` fields and `sections_done` sections, requiring equality.
    /// Used by loaders that rebuild a structure from its primary data and
    /// check the stored auxiliary data against the rebuilt one.
    pub fn expect_rest(
        &mut self,
        expected: &Parts,
        fields_done: usize,
        sections_done: usize,
    ) -> Result<()> {
        for (name, v) in &expected.fields[fields_done..] {
            if self.field()? != *v {
                return Err(Error::Corrupt(format!(
                    "header field {name} inconsistent with data"
                )));
            }
        }
        for (name, b) in &expected.sections[sections_done..] {
            if self.section()? != b {
                return Err(Error::Corrupt(format!(
                    "section {name} inconsistent with data"
                )));
            }
        }
        Ok(())
    }

    pub fn finish(&self) -> Result<()> {
        if self.field != self.parts.fields.len() || self.section != self.parts.sections.len() {
            return Err(Error::Corrupt(
                "unconsumed header fields or sections".into(),
            ));
        }
        Ok(())
    }
}

/// Types with a flattened serialized form.
pub trait Persist: Sized {
    fn write_parts(&self, parts: &mut Parts, prefix: &str);
    fn read_parts(reader: &mut PartsReader<'_>) -> Result<Self>;

    fn to_parts(&self) -> Parts {
        let mut p = Parts::new();
        self.write_parts(&mut p, "");
        p
    }

    fn from_parts(parts: &Parts) -> Result<Self> {
        let mut r = parts.reader();
        let v = Self::read_parts(&mut r)?;
        r.finish()?;
        Ok(v)
    }

    /// Payload bits (sections only).
    fn size_bits(&self) -> u64 {
        self.to_parts().section_bits()
    }
}
