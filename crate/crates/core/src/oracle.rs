//! Reference implementations used as ground truth.
//!
//! Everything here favors obvious correctness over speed: plain vectors,
//! binary search or linear scans, exact big-integer binomials. The `scan`
//! functions restate the definitions literally and are used to cross-check
//! the vector-based versions on small inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitcore::info_bound_exact;
use crate::error::{out_of_range, Error, Result};
use crate::ktree::check_level_order;
use crate::multiset::check_multiset;
use crate::rankselect::check_set;

/// A subset of `[m]` as a sorted vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveSet {
    m: u64,
    elems: Vec<u64>,
}

impl NaiveSet {
    pub fn new(elems: Vec<u64>, m: u64) -> Result<Self> {
        check_set(&elems, m)?;
        Ok(Self { m, elems })
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> u64 {
        self.elems.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elems
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// Members below position `i`.
    pub fn rank1(&self, i: u64) -> u64 {
        self.elems.partition_point(|&e| e < i) as u64
    }

    pub fn rank0(&self, i: u64) -> u64 {
        i - self.rank1(i)
    }

    /// −1 for non-members, else the number of smaller members.
    pub fn rank(&self, x: u64) -> i64 {
        match self.elems.binary_search(&x) {
            Ok(p) => p as i64,
            Err(_) => -1,
        }
    }

    pub fn select1(&self, j: u64) -> Option<u64> {
        (j >= 1)
            .then(|| self.elems.get(j as usize - 1).copied())
            .flatten()
    }

    /// `j`-th non-member.
    pub fn select0(&self, j: u64) -> Option<u64> {
        if j == 0 || j > self.m - self.len() {
            return None;
        }
        // The j-th zero is j−1+t where t members precede it.
        let (mut lo, mut hi) = (0usize, self.elems.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.elems[mid] - (mid as u64) < j {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Some(j - 1 + lo as u64)
    }

    pub fn select(&self, j: u64) -> Result<u64> {
        self.select1(j)
            .ok_or_else(|| Error::OutOfRange(format!("select rank {j} not in 1..={}", self.len())))
    }
}

/// Literal definitions by linear scan.
pub mod scan {
    pub fn rank1(elems: &[u64], i: u64) -> u64 {
        elems.iter().filter(|&&e| e < i).count() as u64
    }

    pub fn rank(elems: &[u64], x: u64) -> i64 {
        if elems.contains(&x) {
            rank1(elems, x) as i64
        } else {
            -1
        }
    }

    pub fn select1(elems: &[u64], j: u64) -> Option<u64> {
        let mut seen = 0;
        for &e in elems {
            seen += 1;
            if seen == j {
                return Some(e);
            }
        }
        None
    }

    pub fn select0(elems: &[u64], m: u64, j: u64) -> Option<u64> {
        let mut seen = 0;
        for x in 0..m {
            if !elems.contains(&x) {
                seen += 1;
                if seen == j {
                    return Some(x);
                }
            }
        }
        None
    }

    /// `Rankm+`: copies below `x`.
    pub fn rankm_plus(values: &[u64], x: u64) -> u64 {
        values.iter().filter(|&&v| v < x).count() as u64
    }

    pub fn rankm(values: &[u64], x: u64) -> i64 {
        if values.contains(&x) {
            rankm_plus(values, x) as i64
        } else {
            -1
        }
    }

    /// Largest member `x` with `Rankm(x) ≤ i − 1`.
    pub fn selectm(values: &[u64], i: u64) -> Option<u64> {
        values
            .iter()
            .copied()
            .filter(|&x| rankm(values, x) < (i as i64))
            .max()
            .filter(|_| i >= 1 && i <= values.len() as u64)
    }

    pub fn sum(xs: &[u64], i: usize) -> u64 {
        xs[..i].iter().sum()
    }

    /// Largest `i` with `Sum(i) < x`, 0 if none.
    pub fn pred(xs: &[u64], x: u64) -> u64 {
        (0..=xs.len())
            .filter(|&i| sum(xs, i) < x)
            .max()
            .unwrap_or(0) as u64
    }
}

/// A multiset over `[m]` as a sorted vector with repetitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveMultiset {
    m: u64,
    values: Vec<u64>,
}

impl NaiveMultiset {
    pub fn new(values: Vec<u64>, m: u64) -> Result<Self> {
        check_multiset(&values, m)?;
        Ok(Self { m, values })
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn rankm_plus(&self, x: u64) -> u64 {
        self.values.partition_point(|&v| v < x) as u64
    }

    pub fn rankm(&self, x: u64) -> i64 {
        if self.values.binary_search(&x).is_ok() {
            self.rankm_plus(x) as i64
        } else {
            -1
        }
    }

    pub fn selectm(&self, i: u64) -> Option<u64> {
        (i >= 1)
            .then(|| self.values.get(i as usize - 1).copied())
            .flatten()
    }
}

/// Prefix sums by direct summation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaivePrefixSum {
    sums: Vec<u64>,
}

impl NaivePrefixSum {
    pub fn new(xs: &[u64]) -> Self {
        let mut acc = 0;
        let mut sums = vec![0];
        for &x in xs {
            acc += x;
            sums.push(acc);
        }
        Self { sums }
    }

    pub fn len(&self) -> u64 {
        self.sums.len() as u64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        *self.sums.last().unwrap()
    }

    /// `Sum(i)` for `0 ≤ i ≤ n`.
    pub fn sum(&self, i: u64) -> Option<u64> {
        self.sums.get(i as usize).copied()
    }

    /// Largest `i` with `Sum(i) < x`, 0 if none.
    pub fn pred(&self, x: u64) -> u64 {
        (self.sums.partition_point(|&s| s < x) as u64).saturating_sub(1)
    }
}

/// A family of subsets of `[m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveMultiDict {
    m: u64,
    sets: Vec<NaiveSet>,
}

impl NaiveMultiDict {
    pub fn new(sets: &[Vec<u64>], m: u64) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| NaiveSet::new(s.clone(), m))
            .collect::<Result<_>>()?;
        Ok(Self { m, sets })
    }

    pub fn universe(&self) -> u64 {
        self.m
    }

    pub fn num_sets(&self) -> u64 {
        self.sets.len() as u64
    }

    pub fn md_size(&self, i: u64) -> Option<u64> {
        self.sets.get(i as usize).map(NaiveSet::len)
    }

    pub fn md_rank(&self, i: u64, x: u64) -> Option<i64> {
        self.sets.get(i as usize).map(|s| s.rank(x))
    }

    pub fn md_select(&self, i: u64, j: u64) -> Option<u64> {
        self.sets.get(i as usize).and_then(|s| s.select1(j))
    }
}

/// A cardinal tree as parent and label arrays (entry 0 is the root), with
/// each node's children listed by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveTree {
    k: u64,
    parent: Vec<u64>,
    label: Vec<u64>,
    children: Vec<Vec<u64>>,
}

impl NaiveTree {
    /// From `(parent, label)` of nodes `1..n`, in level order.
    pub fn new(n: u64, k: u64, edges: &[(u64, u64)]) -> Result<Self> {
        check_level_order(n, k, edges)?;
        let mut parent = vec![0];
        let mut label = vec![0];
        let mut children = vec![Vec::new(); n as usize];
        for (c, &(p, j)) in edges.iter().enumerate() {
            parent.push(p);
            label.push(j);
            children[p as usize].push(c as u64 + 1);
        }
        for ch in &mut children {
            ch.sort_by_key(|&c| label[c as usize]);
        }
        Ok(Self {
            k,
            parent,
            label,
            children,
        })
    }

    pub fn nodes(&self) -> u64 {
        self.parent.len() as u64
    }

    pub fn arity(&self) -> u64 {
        self.k
    }

    fn children(&self, x: u64) -> &[u64] {
        self.children.get(x as usize).map_or(&[], Vec::as_slice)
    }

    pub fn child_by_label(&self, x: u64, j: u64) -> Option<u64> {
        self.children(x)
            .iter()
            .copied()
            .find(|&c| self.label[c as usize] == j)
    }

    pub fn parent(&self, i: u64) -> Option<u64> {
        (i >= 1 && i < self.nodes()).then(|| self.parent[i as usize])
    }

    pub fn label(&self, i: u64) -> Option<u64> {
        (i >= 1 && i < self.nodes()).then(|| self.label[i as usize])
    }

    pub fn degree(&self, x: u64) -> u64 {
        self.children(x).len() as u64
    }

    pub fn ith_child(&self, x: u64, i: u64) -> Option<u64> {
        (i >= 1)
            .then(|| self.children(x).get(i as usize - 1).copied())
            .flatten()
    }

    pub fn ordinal_of_child(&self, x: u64, j: u64) -> Option<u64> {
        let c = self.child_by_label(x, j)?;
        Some(
            self.children(x)
                .iter()
                .filter(|&&d| self.label[d as usize] <= self.label[c as usize])
                .count() as u64,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthWitness {
    pub x: u64,
    pub y: u64,
    pub c: u64,
    /// Exact `B(x, y+c) − B(x, y)`.
    pub difference: u64,
    pub bound: f64,
    pub holds: bool,
}

/// Constant used by [`check_binomial_growth`].
pub const GROWTH_K: f64 = 3.0;

pub fn check_binomial_growth(x: u64, y: u64, c: u64) -> Result<GrowthWitness> {
    if x > y {
        return out_of_range("x", x, format!("0..={y}"));
    }
    let high = info_bound_exact(x, y + c)?;
    let low = info_bound_exact(x, y)?;
    let (xf, yf, cf) = (x as f64, y.max(1) as f64, c as f64);
    let lg_x = if x > 1 { xf.log2() } else { 0.0 };
    let bound = GROWTH_K * (cf * xf / yf + lg_x + xf * xf / yf) + 1.0;
    let difference = high - low;
    Ok(GrowthWitness {
        x,
        y,
        c,
        difference,
        bound,
        holds: difference as f64 <= bound,
    })
}

/// Seeded generators for random test instances.
pub mod gen {
    use super::*;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// A uniformly random `n`-subset of `[m]`.
    pub fn set(rng: &mut ChaCha8Rng, n: u64, m: u64) -> Vec<u64> {
        assert!(n <= m);
        if n * 2 > m {
            let mut all: Vec<u64> = (0..m).collect();
            for i in 0..n as usize {
                let j = rng.gen_range(i..m as usize);
                all.swap(i, j);
            }
            all.truncate(n as usize);
            all.sort_unstable();
            return all;
        }
        let mut s = std::collections::BTreeSet::new();
        while (s.len() as u64) < n {
            s.insert(rng.gen_range(0..m));
        }
        s.into_iter().collect()
    }

    /// `n` values drawn with repetition from `[m]`, sorted.
    pub fn multiset(rng: &mut ChaCha8Rng, n: u64, m: u64) -> Vec<u64> {
        let mut v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        v.sort_unstable();
        v
    }

    /// A random tree on `n` nodes with arity `k`, as level-order `(parent,
    /// label)` pairs. Nodes are attached to uniformly random free slots of
    /// earlier nodes, then renumbered in level order.
    pub fn tree(rng: &mut ChaCha8Rng, n: u64, k: u64) -> Vec<(u64, u64)> {
        assert!(n >= 1 && k >= 1);
        // Children by label of each node in build order.
        let mut kids: Vec<Vec<(u64, usize)>> = vec![Vec::new()];
        let mut free: Vec<(usize, u64)> = (0..k).map(|j| (0, j)).collect();
        for _ in 1..n {
            let at = rng.gen_range(0..free.len());
            let (p, j) = free.swap_remove(at);
            let id = kids.len();
            kids.push(Vec::new());
            kids[p].push((j, id));
            free.extend((0..k).map(|j| (id, j)));
        }
        let mut out = Vec::with_capacity(n as usize - 1);
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut number = 0u64;
        while let Some(v) = queue.pop_front() {
            let mut ch = std::mem::take(&mut kids[v]);
            ch.sort_unstable();
            for (j, c) in ch {
                out.push((number, j));
                queue.push_back(c);
            }
            number += 1;
        }
        out
    }

    /// All level-order trees with `n` nodes and arity `k`.
    pub fn all_trees(n: u64, k: u64) -> Vec<Vec<(u64, u64)>> {
        fn rec(n: u64, k: u64, edges: &mut Vec<(u64, u64)>, out: &mut Vec<Vec<(u64, u64)>>) {
            let have = edges.len() as u64 + 1;
            if have == n {
                out.push(edges.clone());
                return;
            }
            let (p0, j0) = edges.last().map(|&(p, j)| (p, j + 1)).unwrap_or((0, 0));
            for p in p0..have {
                let start = if p == p0 { j0 } else { 0 };
                for j in start..k {
                    edges.push((p, j));
                    rec(n, k, edges, out);
                    edges.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(n, k, &mut Vec::new(), &mut out);
        out
    }
}
