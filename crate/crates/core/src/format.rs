//! On-disk container for any structure.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "SIDX"  version:u16  kind:u16  seed:u64  n:u64  m:u64
//! fields:u32   field:u64 × fields
//! sections:u32 (bits:u64, bytes[⌈bits/8⌉]) × sections
//! crc64:u64    CRC-64/XZ of every preceding byte
//! ```
//!
//! `m` is the universe (the arity `k` for trees, the total for prefix sums).
//! Fields and sections are the structure's [`Parts`] in order; bit streams
//! are packed LSB-first and the last byte of a section is zero-padded.

use std::fmt;
use std::str::FromStr;

use crc::{Crc, CRC_64_XZ};

use crate::bitcore::{info_bound, ktree_bound, BitVector};
use crate::error::{Error, Result};
use crate::idict::{MainDict, SelectOnlySet};
use crate::ktree::CardinalTree;
use crate::multidict::PairDict;
use crate::multiset::IndexableMultiset;
use crate::parts::{Parts, Persist};
use crate::prefixsum::SearchablePrefixSum;
use crate::rankselect::{Fid, RsDirectory};
use crate::rrrfid::RrrFid;

pub const MAGIC: &[u8; 4] = b"SIDX";
pub const VERSION: u16 = 1;
const CRC: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Plain,
    Rrr,
    Id,
    SelectOnly,
    Psum,
    Multiset,
    Multidict,
    Ktree,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Plain,
        Kind::Rrr,
        Kind::Id,
        Kind::SelectOnly,
        Kind::Psum,
        Kind::Multiset,
        Kind::Multidict,
        Kind::Ktree,
    ];

    pub fn tag(self) -> u16 {
        Self::ALL.iter().position(|&k| k == self).unwrap() as u16 + 1
    }

    pub fn from_tag(tag: u16) -> Result<Self> {
        Self::ALL
            .get((tag as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Corrupt(format!("unknown structure kind {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::Rrr => "rrr",
            Kind::Id => "id",
            Kind::SelectOnly => "selectonly",
            Kind::Psum => "psum",
            Kind::Multiset => "multiset",
            Kind::Multidict => "multidict",
            Kind::Ktree => "ktree",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown structure kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Plain(RsDirectory),
    Rrr(RrrFid),
    Id(MainDict),
    SelectOnly(SelectOnlySet),
    Psum(SearchablePrefixSum),
    Multiset(IndexableMultiset),
    Multidict(PairDict),
    Ktree(CardinalTree),
}

impl Structure {
    pub fn kind(&self) -> Kind {
        match self {
            Structure::Plain(_) => Kind::Plain,
            Structure::Rrr(_) => Kind::Rrr,
            Structure::Id(_) => Kind::Id,
            Structure::SelectOnly(_) => Kind::SelectOnly,
            Structure::Psum(_) => Kind::Psum,
            Structure::Multiset(_) => Kind::Multiset,
            Structure::Multidict(_) => Kind::Multidict,
            Structure::Ktree(_) => Kind::Ktree,
        }
    }

    /// Element count: members, sequence length, pairs, or tree nodes.
    pub fn n(&self) -> u64 {
        match self {
            Structure::Plain(d) => d.ones(),
            Structure::Rrr(f) => f.ones(),
            Structure::Id(d) => d.len(),
            Structure::SelectOnly(s) => s.len(),
            Structure::Psum(p) => p.len(),
            Structure::Multiset(ms) => ms.len(),
            Structure::Multidict(d) => d.len(),
            Structure::Ktree(t) => t.nodes(),
        }
    }

    /// Universe, prefix-sum total, or tree arity.
    pub fn m(&self) -> u64 {
        match self {
            Structure::Plain(d) => d.universe(),
            Structure::Rrr(f) => f.universe(),
            Structure::Id(d) => d.universe(),
            Structure::SelectOnly(s) => s.universe(),
            Structure::Psum(p) => p.total(),
            Structure::Multiset(ms) => ms.universe(),
            Structure::Multidict(d) => d.universe(),
            Structure::Ktree(t) => t.arity(),
        }
    }

    /// Information-theoretic minimum for the represented object.
    pub fn lower_bound(&self) -> Result<u64> {
        let (n, m) = (self.n(), self.m());
        match self {
            Structure::Psum(_) | Structure::Multiset(_) => info_bound(n, m + n),
            Structure::Multidict(d) => info_bound(n, m * d.num_sets()),
            Structure::Ktree(_) => ktree_bound(n, m),
            _ => info_bound(n, m),
        }
    }

    pub fn to_parts(&self) -> Parts {
        match self {
            Structure::Plain(x) => x.to_parts(),
            Structure::Rrr(x) => x.to_parts(),
            Structure::Id(x) => x.to_parts(),
            Structure::SelectOnly(x) => x.to_parts(),
            Structure::Psum(x) => x.to_parts(),
            Structure::Multiset(x) => x.to_parts(),
            Structure::Multidict(x) => x.to_parts(),
            Structure::Ktree(x) => x.to_parts(),
        }
    }

    pub fn from_parts(kind: Kind, parts: &Parts) -> Result<Self> {
        Ok(match kind {
            Kind::Plain => Structure::Plain(RsDirectory::from_parts(parts)?),
            Kind::Rrr => Structure::Rrr(RrrFid::from_parts(parts)?),
            Kind::Id => Structure::Id(MainDict::from_parts(parts)?),
            Kind::SelectOnly => Structure::SelectOnly(SelectOnlySet::from_parts(parts)?),
            Kind::Psum => Structure::Psum(SearchablePrefixSum::from_parts(parts)?),
            Kind::Multiset => Structure::Multiset(IndexableMultiset::from_parts(parts)?),
            Kind::Multidict => Structure::Multidict(PairDict::from_parts(parts)?),
            Kind::Ktree => Structure::Ktree(CardinalTree::from_parts(parts)?),
        })
    }
}

/// A structure with its build seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureFile {
    pub seed: u64,
    pub structure: Structure,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(k)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Corrupt("file truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl StructureFile {
    pub fn new(structure: Structure, seed: u64) -> Self {
        Self { seed, structure }
    }

    pub fn kind(&self) -> Kind {
        self.structure.kind()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let parts = self.structure.to_parts();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.kind().tag().to_le_bytes());
        for v in [self.seed, self.structure.n(), self.structure.m()] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(parts.fields.len() as u32).to_le_bytes());
        for (_, v) in &parts.fields {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(parts.sections.len() as u32).to_le_bytes());
        for (_, b) in &parts.sections {
            out.extend_from_slice(&(b.len() as u64).to_le_bytes());
            out.extend_from_slice(&b.to_bytes());
        }
        let crc = CRC.checksum(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 8 {
            return Err(Error::Corrupt("file too short".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        if CRC.checksum(body) != stored {
            return Err(Error::Corrupt("checksum mismatch".into()));
        }
        let mut c = Cursor {
            bytes: body,
            pos: 0,
        };
        if c.take(4)? != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = c.u16()?;
        if version != VERSION {
            return Err(Error::Corrupt(format!("unsupported version {version}")));
        }
        let kind = Kind::from_tag(c.u16()?)?;
        let seed = c.u64()?;
        let n = c.u64()?;
        let m = c.u64()?;
        let mut parts = Parts::new();
        let nf = c.u32()?;
        for _ in 0..nf {
            let v = c.u64()?;
            parts.fields.push((String::new(), v));
        }
        let ns = c.u32()?;
        for _ in 0..ns {
            let bits = c.u64()?;
            let len =
                usize::try_from(bits).map_err(|_| Error::Corrupt("section too large".into()))?;
            let raw = c.take(len.div_ceil(8))?;
            parts
                .sections
                .push((String::new(), BitVector::from_bytes(raw, len)?));
        }
        if c.pos != body.len() {
            return Err(Error::Corrupt("trailing bytes before checksum".into()));
        }
        let structure = Structure::from_parts(kind, &parts)?;
        if structure.n() != n || structure.m() != m {
            return Err(Error::Corrupt("header disagrees with the structure".into()));
        }
        Ok(Self { seed, structure })
    }

    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_bytes())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }
}
