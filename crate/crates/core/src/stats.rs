//! Space accounting for a stored structure.

use serde::Serialize;

use crate::error::Result;
use crate::format::Structure;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub name: String,
    pub bits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub kind: String,
    pub n: u64,
    /// Universe, prefix-sum total, or arity, as named by `m_name`.
    pub m: u64,
    pub m_name: &'static str,
    pub total_bits: u64,
    pub breakdown: Vec<Component>,
    /// Header fields as stored (64 bits each, not in `total_bits`).
    pub header_fields: Vec<(String, u64)>,
    pub payload_bytes: u64,
    pub padding_bits: u64,
    pub lower_bound: u64,
    pub overhead_bits: i64,
    pub overhead_per_element: f64,
}

impl StatsReport {
    pub fn of(s: &Structure) -> Result<Self> {
        let parts = s.to_parts();
        let breakdown: Vec<Component> = parts
            .sections
            .iter()
            .map(|(name, b)| Component {
                name: name.clone(),
                bits: b.len() as u64,
            })
            .collect();
        let total_bits: u64 = breakdown.iter().map(|c| c.bits).sum();
        let payload_bytes: u64 = breakdown.iter().map(|c| c.bits.div_ceil(8)).sum();
        let lower_bound = s.lower_bound()?;
        let overhead_bits = total_bits as i64 - lower_bound as i64;
        let n = s.n();
        Ok(Self {
            kind: s.kind().name().to_string(),
            n,
            m: s.m(),
            m_name: match s {
                Structure::Psum(_) => "total",
                Structure::Ktree(_) => "k",
                _ => "m",
            },
            total_bits,
            breakdown,
            header_fields: parts.fields.clone(),
            payload_bytes,
            padding_bits: 8 * payload_bytes - total_bits,
            lower_bound,
            overhead_bits,
            overhead_per_element: if n == 0 {
                0.0
            } else {
                overhead_bits as f64 / n as f64
            },
        })
    }

    /// Plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "kind {}\nn {}\n{} {}\ntotal_bits {}\nlower_bound {}\noverhead_bits {}\noverhead_per_element {:.4}\n",
            self.kind,
            self.n,
            self.m_name,
            self.m,
            self.total_bits,
            self.lower_bound,
            self.overhead_bits,
            self.overhead_per_element
        );
        for c in &self.breakdown {
            s.push_str(&format!("  {:<40} {}\n", c.name, c.bits));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrrfid::RrrFid;

    #[test]
    fn full_set_has_empty_offsets() {
        let f = RrrFid::build(&(0..64).collect::<Vec<_>>(), 64).unwrap();
        let r = StatsReport::of(&Structure::Rrr(f)).unwrap();
        let off = r.breakdown.iter().find(|c| c.name == "offsets").unwrap();
        assert_eq!(off.bits, 0);
        assert_eq!(r.lower_bound, 0);
        assert_eq!(
            r.total_bits,
            r.breakdown.iter().map(|c| c.bits).sum::<u64>()
        );
        assert_eq!(r.total_bits, 8 * r.payload_bytes - r.padding_bits);
    }
}
