//! Many subsets of one universe stored as a single dictionary of pairs.
//!
//! Set `i` contributes the keys `i·m′ + j` for `j ∈ S_i`. In the bucketed
//! form `m′` is `m` rounded up to a multiple of `2^l`, so no bucket mixes
//! two sets and the number of pairs before set `i` is a top-level prefix sum.

use crate::error::{out_of_range, Error, Result};
use crate::idict::{choose_shift, main_is_dense, MainDict, DEFAULT_D};
use crate::parts::{join, Parts, PartsReader, Persist};

/// Default bound on sets per stored element.
pub const DEFAULT_SIGMA: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDict {
    s: u64,
    m: u64,
    m_prime: u64,
    core: MainDict,
}

impl PairDict {
    pub fn build(sets: &[Vec<u64>], m: u64, seed: u64) -> Result<Self> {
        Self::build_with(sets, m, DEFAULT_SIGMA, seed)
    }

    pub fn build_with(sets: &[Vec<u64>], m: u64, sigma: u64, seed: u64) -> Result<Self> {
        let s = sets.len() as u64;
        if s == 0 {
            return Err(Error::InvalidInput("at least one set is required".into()));
        }
        let n: u64 = sets.iter().map(|x| x.len() as u64).sum();
        if s > (sigma * n).max(sigma) {
            return Err(Error::InvalidInput(format!(
                "{s} sets exceed {sigma} per stored element (n = {n})"
            )));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(format!(
                    "set {i} is not strictly increasing"
                )));
            }
            if let Some(&x) = set.last() {
                if x >= m {
                    return Err(Error::InvalidInput(format!(
                        "set {i}: key {x} not in 0..{m}"
                    )));
                }
            }
        }
        let ms = m
            .checked_mul(s)
            .filter(|&v| v < 1 << 63)
            .ok_or_else(|| Error::InvalidInput("pair universe exceeds 2^63".into()))?;
        let shift = (n > 0 && !main_is_dense(n, ms)).then(|| choose_shift(n, ms));
        let m_prime = match shift {
            Some(l) => m.div_ceil(1 << l) << l,
            None => m,
        };
        let universe = m_prime
            .checked_mul(s)
            .filter(|&v| v < 1 << 63)
            .ok_or_else(|| Error::InvalidInput("rounded pair universe exceeds 2^63".into()))?;
        if let Some(l) = shift {
            if n >= 1 << 16 && universe >= 2 * ms {
                return Err(Error::Construction(format!(
                    "rounded universe {universe} not below twice {ms} (l = {l})"
                )));
            }
        }
        let mut keys = Vec::with_capacity(n as usize);
        for (i, set) in sets.iter().enumerate() {
            keys.extend(set.iter().map(|&j| i as u64 * m_prime + j));
        }
        if let Some(l) = shift {
            let per_set = m_prime >> l;
            for (k, set) in sets.iter().enumerate() {
                for &j in set {
                    if ((k as u64 * m_prime + j) >> l) / per_set != k as u64 {
                        return Err(Error::Construction(format!(
                            "pair ({k}, {j}) crosses a bucket"
                        )));
                    }
                }
            }
        }
        let core = MainDict::build_layout(&keys, universe, shift, DEFAULT_D, seed)?;
        Ok(Self {
            s,
            m,
            m_prime,
            core,
        })
    }

    pub fn num_sets(&self) -> u64 {
        self.s
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    /// The rounded per-set stride `m′`.
    pub fn stride(&self) -> u64 {
        self.m_prime
    }

    /// Total number of stored pairs.
    pub fn len(&self) -> u64 {
        self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }

    pub fn core(&self) -> &MainDict {
        &self.core
    }

    /// Whether `m′·s < 2·m·s`.
    pub fn rounding_within_bound(&self) -> bool {
        self.m_prime < 2 * self.m.max(1)
    }

    /// Pairs whose first coordinate is below `i`, for `i ≤ s`.
    #[inline]
    pub fn boundary_rank(&self, i: u64) -> u64 {
        self.core.bucket_boundary_rank(i * self.m_prime)
    }

    fn check_set_index(&self, i: u64) -> Result<()> {
        if i >= self.s {
            return out_of_range("set index", i, format!("0..{}", self.s));
        }
        Ok(())
    }

    pub fn md_size(&self, i: u64) -> Result<u64> {
        self.check_set_index(i)?;
        Ok(self.boundary_rank(i + 1) - self.boundary_rank(i))
    }

    /// Rank of `x` within set `i`, −1 if absent.
    pub fn md_rank(&self, i: u64, x: u64) -> Result<i64> {
        self.check_set_index(i)?;
        if x >= self.m {
            return out_of_range("key", x, format!("0..{}", self.m));
        }
        let r = self.core.rank_unchecked(i * self.m_prime + x);
        Ok(if r < 0 {
            -1
        } else {
            r - self.boundary_rank(i) as i64
        })
    }

    /// `j`-th smallest element of set `i`.
    pub fn md_select(&self, i: u64, j: u64) -> Result<u64> {
        let size = self.md_size(i)?;
        if j == 0 || j > size {
            return out_of_range("select rank", j, format!("1..={size}"));
        }
        Ok(self.core.select_unchecked(self.boundary_rank(i) + j) - i * self.m_prime)
    }

    pub fn to_sets(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); self.s as usize];
        for key in self.core.to_keys() {
            out[(key / self.m_prime) as usize].push(key % self.m_prime);
        }
        out
    }

    pub fn size_bits(&self) -> u64 {
        self.core.size_bits()
    }
}

impl Persist for PairDict {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "s", self.s);
        parts.field(prefix, "m", self.m);
        parts.field(prefix, "m_prime", self.m_prime);
        self.core.write_parts(parts, &join(prefix, "core"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let s = r.field()?;
        let m = r.field()?;
        let m_prime = r.field()?;
        let core = MainDict::read_parts(r)?;
        if s == 0 || m_prime < m || m_prime.checked_mul(s) != Some(core.universe()) {
            return Err(Error::Corrupt(
                "pair dictionary shape is inconsistent".into(),
            ));
        }
        if let Some(l) = core.shift() {
            if m_prime % (1 << l) != 0 {
                return Err(Error::Corrupt("stride is not bucket aligned".into()));
            }
        }
        Ok(Self {
            s,
            m,
            m_prime,
            core,
        })
    }

    fn size_bits(&self) -> u64 {
        PairDict::size_bits(self)
    }
}

/// Directed graph on `[v]` as one adjacency set per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    adj: PairDict,
}

impl Digraph {
    /// Builds from `(from, to)` edges; duplicates are rejected.
    pub fn build(vertices: u64, edges: &[(u64, u64)], seed: u64) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidInput(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut sets = vec![Vec::new(); vertices as usize];
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) outside 0..{vertices}"
                )));
            }
            sets[u as usize].push(v);
        }
        for (u, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("duplicate edge out of {u}")));
            }
        }
        Ok(Self {
            adj: PairDict::build(&sets, vertices, seed)?,
        })
    }

    pub fn vertices(&self) -> u64 {
        self.adj.num_sets()
    }

    pub fn edges(&self) -> u64 {
        self.adj.len()
    }

    pub fn pairs(&self) -> &PairDict {
        &self.adj
    }

    pub fn adjacent(&self, u: u64, v: u64) -> Result<bool> {
        Ok(self.adj.md_rank(u, v)? >= 0)
    }

    pub fn out_degree(&self, u: u64) -> Result<u64> {
        self.adj.md_size(u)
    }

    /// `i`-th out-neighbor of `u` in increasing order, `1 ≤ i ≤ degree`.
    pub fn neighbor(&self, u: u64, i: u64) -> Result<u64> {
        self.adj.md_select(u, i)
    }
}

impl Persist for Digraph {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        self.adj.write_parts(parts, prefix);
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let adj = PairDict::read_parts(r)?;
        if adj.universe() != adj.num_sets() {
            return Err(Error::Corrupt(
                "graph universe differs from vertex count".into(),
            ));
        }
        Ok(Self { adj })
    }

    fn size_bits(&self) -> u64 {
        self.adj.size_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashkit::mix64;

    #[test]
    fn three_sets_example() {
        let d = PairDict::build(&[vec![5], vec![], vec![3]], 8, 1).unwrap();
        assert_eq!(
            (0..3).map(|i| d.md_size(i).unwrap()).collect::<Vec<_>>(),
            [1, 0, 1]
        );
        assert_eq!(d.md_rank(0, 5).unwrap(), 0);
        assert_eq!(d.md_rank(0, 3).unwrap(), -1);
        assert_eq!(d.md_select(2, 1).unwrap(), 3);
        assert!(d.md_select(1, 1).is_err());
        assert!(d.md_size(3).is_err());
        assert_eq!(d.to_sets(), vec![vec![5], vec![], vec![3]]);
    }

    #[test]
    fn single_set_matches_main_dict() {
        let set: Vec<u64> = (0..500u64).map(|i| i * 7919 % 100_003).collect();
        let mut set = set;
        set.sort_unstable();
        let m = 100_003;
        let d = PairDict::build(&[set.clone()], m, 2).unwrap();
        let md = MainDict::build(&set, m, 2).unwrap();
        for x in (0..m).step_by(13) {
            assert_eq!(d.md_rank(0, x).unwrap(), md.rank(x).unwrap());
        }
    }

    #[test]
    fn random_sets_bucketed() {
        let m = 1 << 20;
        let mut x = 5u64;
        let sets: Vec<Vec<u64>> = (0..16)
            .map(|k| {
                let mut s: Vec<u64> = (0..(200 * (k + 1)))
                    .map(|_| {
                        x = mix64(x);
                        x % m
                    })
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let d = PairDict::build(&sets, m, 9).unwrap();
        assert!(d.core().shift().is_some());
        assert_eq!(d.stride() % (1 << d.core().shift().unwrap()), 0);
        assert!(d.rounding_within_bound());
        for (i, s) in sets.iter().enumerate() {
            let i = i as u64;
            assert_eq!(d.md_size(i).unwrap(), s.len() as u64);
            for (j, &v) in s.iter().enumerate() {
                assert_eq!(d.md_select(i, j as u64 + 1).unwrap(), v);
                assert_eq!(d.md_rank(i, v).unwrap(), j as i64);
            }
            for _ in 0..500 {
                x = mix64(x);
                let y = x % m;
                let e = s.binary_search(&y).map(|p| p as i64).unwrap_or(-1);
                assert_eq!(d.md_rank(i, y).unwrap(), e);
            }
        }
        assert_eq!(PairDict::from_parts(&d.to_parts()).unwrap(), d);
    }

    #[test]
    fn full_set_selects_identity() {
        let d = PairDict::build(&[vec![1], (0..10).collect()], 10, 0).unwrap();
        for j in 1..=10 {
            assert_eq!(d.md_select(1, j).unwrap(), j - 1);
        }
    }

    #[test]
    fn too_many_sets_rejected() {
        let sets = vec![vec![]; 9];
        let mut sets = sets;
        sets[0] = vec![1];
        assert!(PairDict::build(&sets, 4, 0).is_err());
        assert!(PairDict::build(&[], 4, 0).is_err());
    }

    #[test]
    fn graphs() {
        let g = Digraph::build(3, &[(0, 1), (1, 2), (2, 0)], 0).unwrap();
        assert_eq!(g.neighbor(1, 1).unwrap(), 2);
        assert!(g.adjacent(2, 0).unwrap());
        assert!(!g.adjacent(0, 2).unwrap());
        let k4: Vec<(u64, u64)> = (0..4)
            .flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        let g = Digraph::build(4, &k4, 0).unwrap();
        assert!((0..4).all(|u| g.out_degree(u).unwrap() == 3));
        let e = Digraph::build(4, &[], 0).unwrap();
        assert!((0..4).all(|u| e.out_degree(u).unwrap() == 0));
        assert!(Digraph::build(2, &[(0, 1), (0, 1)], 0).is_err());
    }
}
