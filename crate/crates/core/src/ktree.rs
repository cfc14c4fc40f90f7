//! k-ary cardinal trees.
//!
//! Nodes are numbered in level order, children left to right by label, with
//! the root as node 0. The edges form the pair set `{⟨x, j⟩}` of a
//! [`PairDict`] with one set of labels per node, so node `i > 0` is the
//! `i`-th pair in sorted order.

use crate::error::{out_of_range, Error, Result};
use crate::multidict::PairDict;
use crate::parts::{join, Parts, PartsReader, Persist};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalTree {
    n: u64,
    k: u64,
    edges: PairDict,
}

/// Checks that `(parent, label)` for nodes `1..n` describes a tree whose
/// numbering is level order.
pub fn check_level_order(n: u64, k: u64, edges: &[(u64, u64)]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("a tree has at least one node".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("arity must be at least 1".into()));
    }
    if edges.len() as u64 != n - 1 {
        return Err(Error::InvalidInput(format!(
            "{} edges given for {n} nodes",
            edges.len()
        )));
    }
    for (i, &(p, j)) in edges.iter().enumerate() {
        let child = i as u64 + 1;
        if j >= k {
            return Err(Error::InvalidInput(format!(
                "node {child}: label {j} ≥ arity {k}"
            )));
        }
        if p >= child {
            return Err(Error::InvalidInput(format!(
                "node {child}: parent {p} does not precede it"
            )));
        }
        if i > 0 {
            let prev = edges[i - 1];
            if prev == (p, j) {
                return Err(Error::InvalidInput(format!("node {p} has label {j} twice")));
            }
            if prev > (p, j) {
                return Err(Error::InvalidInput(format!(
                    "node {child} breaks level order after ({}, {})",
                    prev.0, prev.1
                )));
            }
        }
    }
    Ok(())
}

impl CardinalTree {
    /// Builds from `(parent, label)` of nodes `1, …, n−1`.
    pub fn build(n: u64, k: u64, edges: &[(u64, u64)], seed: u64) -> Result<Self> {
        check_level_order(n, k, edges)?;
        let mut sets = vec![Vec::new(); n as usize];
        for &(p, j) in edges {
            sets[p as usize].push(j);
        }
        Ok(Self {
            n,
            k,
            edges: PairDict::build(&sets, k, seed)?,
        })
    }

    pub fn nodes(&self) -> u64 {
        self.n
    }

    pub fn arity(&self) -> u64 {
        self.k
    }

    pub fn edges(&self) -> &PairDict {
        &self.edges
    }

    fn check_node(&self, x: u64) -> Result<()> {
        if x >= self.n {
            return out_of_range("node", x, format!("0..{}", self.n));
        }
        Ok(())
    }

    fn check_label(&self, j: u64) -> Result<()> {
        if j >= self.k {
            return out_of_range("label", j, format!("0..{}", self.k));
        }
        Ok(())
    }

    /// Child of `x` along label `j`, if present.
    pub fn child_by_label(&self, x: u64, j: u64) -> Result<Option<u64>> {
        self.check_node(x)?;
        self.check_label(j)?;
        let r = self
            .edges
            .core()
            .rank_unchecked(x * self.edges.stride() + j);
        Ok((r >= 0).then(|| r as u64 + 1))
    }

    fn check_child(&self, i: u64) -> Result<()> {
        if i == 0 || i >= self.n {
            return out_of_range("non-root node", i, format!("1..{}", self.n));
        }
        Ok(())
    }

    pub fn parent(&self, i: u64) -> Result<u64> {
        self.check_child(i)?;
        Ok(self.edges.core().select_unchecked(i) / self.edges.stride())
    }

    /// Label of the edge into node `i`.
    pub fn label(&self, i: u64) -> Result<u64> {
        self.check_child(i)?;
        Ok(self.edges.core().select_unchecked(i) % self.edges.stride())
    }

    pub fn degree(&self, x: u64) -> Result<u64> {
        self.check_node(x)?;
        self.edges.md_size(x)
    }

    /// The `i`-th child of `x` in label order, `1 ≤ i ≤ degree(x)`.
    pub fn ith_child(&self, x: u64, i: u64) -> Result<u64> {
        let deg = self.degree(x)?;
        if i == 0 || i > deg {
            return out_of_range("child index", i, format!("1..={deg}"));
        }
        Ok(self.edges.boundary_rank(x) + i)
    }

    /// Position (1-based) of the child labeled `j` among the children of `x`.
    pub fn ordinal_of_child(&self, x: u64, j: u64) -> Result<Option<u64>> {
        self.check_node(x)?;
        self.check_label(j)?;
        let r = self.edges.md_rank(x, j)?;
        Ok((r >= 0).then(|| r as u64 + 1))
    }

    /// `(parent, label)` of nodes `1, …, n−1`.
    pub fn to_edges(&self) -> Vec<(u64, u64)> {
        let stride = self.edges.stride();
        self.edges
            .core()
            .to_keys()
            .into_iter()
            .map(|key| (key / stride, key % stride))
            .collect()
    }

    pub fn size_bits(&self) -> u64 {
        self.edges.size_bits()
    }
}

impl Persist for CardinalTree {
    fn write_parts(&self, parts: &mut Parts, prefix: &str) {
        parts.field(prefix, "n", self.n);
        parts.field(prefix, "k", self.k);
        self.edges.write_parts(parts, &join(prefix, "edges"));
    }

    fn read_parts(r: &mut PartsReader<'_>) -> Result<Self> {
        let n = r.field()?;
        let k = r.field()?;
        let edges = PairDict::read_parts(r)?;
        if n == 0 || edges.num_sets() != n || edges.universe() != k || edges.len() != n - 1 {
            return Err(Error::Corrupt("tree parts disagree".into()));
        }
        let tree = Self { n, k, edges };
        check_level_order(n, k, &tree.to_edges())
            .map_err(|e| Error::Corrupt(format!("stored edges: {e}")))?;
        Ok(tree)
    }

    fn size_bits(&self) -> u64 {
        CardinalTree::size_bits(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CardinalTree {
        CardinalTree::build(4, 3, &[(0, 0), (0, 2), (1, 1)], 0).unwrap()
    }

    #[test]
    fn four_node_example() {
        let t = example();
        assert_eq!(t.child_by_label(0, 0).unwrap(), Some(1));
        assert_eq!(t.child_by_label(0, 1).unwrap(), None);
        assert_eq!(t.child_by_label(1, 1).unwrap(), Some(3));
        assert_eq!(t.parent(3).unwrap(), 1);
        assert_eq!(t.parent(1).unwrap(), 0);
        assert_eq!(t.degree(0).unwrap(), 2);
        assert_eq!(t.ith_child(0, 2).unwrap(), 2);
        assert_eq!(t.ordinal_of_child(1, 1).unwrap(), Some(1));
        assert_eq!(t.to_edges(), [(0, 0), (0, 2), (1, 1)]);
        assert!(t.parent(0).is_err());
        assert_eq!(CardinalTree::from_parts(&t.to_parts()).unwrap(), t);
    }

    #[test]
    fn single_node_and_shapes() {
        let t = CardinalTree::build(1, 5, &[], 0).unwrap();
        assert_eq!(t.degree(0).unwrap(), 0);
        let bin = CardinalTree::build(7, 2, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)], 0)
            .unwrap();
        assert!((0..3).all(|x| bin.degree(x).unwrap() == 2));
        let chain: Vec<(u64, u64)> = (0..20).map(|i| (i, 1)).collect();
        let c = CardinalTree::build(21, 2, &chain, 0).unwrap();
        assert!((1..21).all(|i| c.parent(i).unwrap() == i - 1));
    }

    #[test]
    fn rejects_bad_numbering() {
        assert!(CardinalTree::build(3, 2, &[(0, 1), (0, 0)], 0).is_err());
        assert!(CardinalTree::build(3, 2, &[(0, 0), (0, 0)], 0).is_err());
        assert!(CardinalTree::build(3, 2, &[(0, 0), (0, 2)], 0).is_err());
        assert!(CardinalTree::build(3, 2, &[(1, 0), (0, 0)], 0).is_err());
        assert!(CardinalTree::build(3, 2, &[(0, 0)], 0).is_err());
    }
}
