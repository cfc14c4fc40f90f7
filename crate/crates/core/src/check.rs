//! Query-by-query comparison of a structure with the reference oracles.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::format::{Kind, Structure};
use crate::idict::{MainDict, SelectOnlySet};
use crate::ktree::CardinalTree;
use crate::multidict::PairDict;
use crate::multiset::IndexableMultiset;
use crate::oracle::{gen, NaiveMultiDict, NaiveMultiset, NaivePrefixSum, NaiveSet, NaiveTree};
use crate::prefixsum::SearchablePrefixSum;
use crate::rankselect::{Fid, RsDirectory};
use crate::rrrfid::RrrFid;

/// Uniform over bit lengths, then uniform within the length, in `lo..=hi`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    assert!(lo <= hi);
    let top = 64 - hi.leading_zeros();
    let bits = rng.gen_range(64 - lo.leading_zeros()..=top);
    let (a, b) = if bits == 0 {
        (0, 0)
    } else {
        (
            1u64 << (bits - 1),
            (1u64 << (bits - 1)) + ((1u64 << (bits - 1)) - 1),
        )
    };
    rng.gen_range(a.max(lo)..=b.min(hi))
}

/// A random instance of `kind` with universe at most `max_m` and at most
/// `max_n` elements. Sizes are drawn log-uniformly so small cases are common.
pub fn random_structure(
    kind: Kind,
    rng: &mut ChaCha8Rng,
    max_m: u64,
    max_n: u64,
    seed: u64,
) -> Result<Structure> {
    let m = log_uniform(rng, 1, max_m.max(1));
    let n = log_uniform(rng, 0, m.min(max_n));
    Ok(match kind {
        Kind::Plain => Structure::Plain(RsDirectory::build(&gen::set(rng, n, m), m)?),
        Kind::Rrr => Structure::Rrr(RrrFid::build(&gen::set(rng, n, m), m)?),
        Kind::Id => Structure::Id(MainDict::build(&gen::set(rng, n, m), m, seed)?),
        Kind::SelectOnly => Structure::SelectOnly(SelectOnlySet::build(&gen::set(rng, n, m), m)?),
        Kind::Psum => {
            let cap = m / n.max(1);
            let xs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=cap)).collect();
            Structure::Psum(SearchablePrefixSum::build(&xs))
        }
        Kind::Multiset => {
            let v = gen::multiset(rng, n, m);
            Structure::Multiset(IndexableMultiset::build(&v, m, seed)?)
        }
        Kind::Multidict => {
            let s = rng.gen_range(1..=(4 * n).clamp(1, 256));
            let mut sets = vec![Vec::new(); s as usize];
            for _ in 0..n {
                sets[rng.gen_range(0..s) as usize].push(rng.gen_range(0..m));
            }
            for set in &mut sets {
                set.sort_unstable();
                set.dedup();
            }
            Structure::Multidict(PairDict::build(&sets, m, seed)?)
        }
        Kind::Ktree => {
            let nodes = n.clamp(1, 1 << 12);
            let k = log_uniform(rng, 1, m.min(1 << 10));
            let edges = gen::tree(rng, nodes, k);
            Structure::Ktree(CardinalTree::build(nodes, k, &edges, seed)?)
        }
    })
}

/// Ground truth for one structure.
#[derive(Clone, Debug)]
pub enum Reference {
    Set(NaiveSet),
    Psum(NaivePrefixSum),
    Multiset(NaiveMultiset),
    Multidict(NaiveMultiDict),
    Tree(NaiveTree),
}

impl Reference {
    /// Decodes the stored contents of `s` sequentially.
    pub fn decode(s: &Structure) -> Result<Self> {
        Ok(match s {
            Structure::Plain(d) => {
                let elems = d
                    .raw()
                    .ones()
                    .map(|i| i as u64)
                    .take_while(|&i| i < d.universe())
                    .collect();
                Reference::Set(NaiveSet::new(elems, d.universe())?)
            }
            Structure::Rrr(f) => Reference::Set(NaiveSet::new(f.to_elements(), f.universe())?),
            Structure::Id(d) => Reference::Set(NaiveSet::new(d.to_keys(), d.universe())?),
            Structure::SelectOnly(so) => Reference::Set(NaiveSet::new(
                (1..=so.len()).map(|i| so.select_unchecked(i)).collect(),
                so.universe(),
            )?),
            Structure::Psum(p) => Reference::Psum(NaivePrefixSum::new(&p.to_values())),
            Structure::Multiset(ms) => Reference::Multiset(NaiveMultiset::new(
                (1..=ms.len())
                    .map(|i| ms.selectm(i))
                    .collect::<Result<_>>()?,
                ms.universe(),
            )?),
            Structure::Multidict(d) => {
                Reference::Multidict(NaiveMultiDict::new(&d.to_sets(), d.universe())?)
            }
            Structure::Ktree(t) => {
                Reference::Tree(NaiveTree::new(t.nodes(), t.arity(), &t.to_edges())?)
            }
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckOutcome {
    pub queries: u64,
    pub mismatches: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn expect<T: PartialEq + std::fmt::Debug>(
        &mut self,
        what: impl FnOnce() -> String,
        got: T,
        want: T,
    ) {
        self.queries += 1;
        if got != want && self.mismatches.len() < 20 {
            self.mismatches
                .push(format!("{}: got {got:?}, expected {want:?}", what()));
        }
    }

    pub fn merge(&mut self, other: CheckOutcome) {
        self.queries += other.queries;
        for m in other.mismatches {
            if self.mismatches.len() < 20 {
                self.mismatches.push(m);
            }
        }
    }
}

/// Arguments in `lo..=hi`: all of them if `probes` is `None` or covers the
/// range, else the two values at each end plus `probes` random points.
fn points(rng: &mut ChaCha8Rng, lo: u64, hi: u64, probes: Option<u64>) -> Vec<u64> {
    if lo > hi {
        return Vec::new();
    }
    match probes {
        Some(p) if hi - lo >= p.max(4) => {
            let mut v = vec![lo, lo + 1, hi - 1, hi];
            v.extend((0..p).map(|_| rng.gen_range(lo..=hi)));
            v
        }
        _ => (lo..=hi).collect(),
    }
}

fn ok<T>(r: Result<T>) -> Option<T> {
    r.ok()
}

/// Compares every query kind of `s` with `r`. `probes` bounds the number of
/// arguments tried per query kind; `None` tries all.
pub fn check(
    s: &Structure,
    r: &Reference,
    rng: &mut ChaCha8Rng,
    probes: Option<u64>,
) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    match (s, r) {
        (Structure::Plain(_) | Structure::Rrr(_), Reference::Set(o)) => {
            let f: &dyn Fid = match s {
                Structure::Plain(d) => d,
                Structure::Rrr(f) => f,
                _ => unreachable!(),
            };
            let m = o.universe();
            for i in points(rng, 0, m, probes) {
                out.expect(|| format!("rank1({i})"), f.rank1(i).ok(), Some(o.rank1(i)));
                out.expect(|| format!("rank0({i})"), f.rank0(i).ok(), Some(o.rank0(i)));
                let want = (i < m).then(|| o.contains(i));
                out.expect(|| format!("access({i})"), f.access(i).ok(), want);
                out.expect(
                    || format!("set_rank({i})"),
                    f.set_rank(i).ok(),
                    (i < m).then(|| o.rank(i)),
                );
            }
            for j in points(rng, 0, o.len() + 1, probes) {
                out.expect(|| format!("select1({j})"), f.select1(j).ok(), o.select1(j));
            }
            for j in points(rng, 0, m - o.len() + 1, probes) {
                out.expect(|| format!("select0({j})"), f.select0(j).ok(), o.select0(j));
            }
        }
        (Structure::Id(d), Reference::Set(o)) => {
            for x in points(rng, 0, o.universe(), probes) {
                let want = (x < o.universe()).then(|| o.rank(x));
                out.expect(|| format!("rank({x})"), ok(d.rank(x)), want);
            }
            for i in points(rng, 1, o.len(), probes) {
                let x = o.elements()[i as usize - 1];
                out.expect(
                    || format!("rank(member {x})"),
                    ok(d.rank(x)),
                    Some(i as i64 - 1),
                );
            }
            for i in points(rng, 0, o.len() + 1, probes) {
                out.expect(|| format!("select({i})"), ok(d.select(i)), o.select1(i));
            }
        }
        (Structure::SelectOnly(so), Reference::Set(o)) => {
            for i in points(rng, 0, o.len() + 1, probes) {
                out.expect(|| format!("select({i})"), ok(so.select(i)), o.select1(i));
            }
        }
        (Structure::Psum(p), Reference::Psum(o)) => {
            for i in points(rng, 0, o.len() + 1, probes) {
                let want = (i >= 1).then(|| o.sum(i)).flatten();
                out.expect(|| format!("sum({i})"), ok(p.sum(i)), want);
            }
            for x in points(rng, 0, o.total() + 1, probes) {
                let want = (x >= 1 && x <= o.total()).then(|| o.pred(x));
                out.expect(|| format!("pred({x})"), ok(p.pred(x)), want);
            }
        }
        (Structure::Multiset(ms), Reference::Multiset(o)) => {
            let dense = matches!(ms, crate::multiset::IndexableMultiset::Dense(_));
            for x in points(rng, 0, o.universe(), probes) {
                let inside = x < o.universe();
                out.expect(
                    || format!("rankm({x})"),
                    ok(ms.rankm(x)),
                    inside.then(|| o.rankm(x)),
                );
                if dense {
                    let want = inside.then(|| o.rankm_plus(x));
                    out.expect(|| format!("rankm_plus({x})"), ok(ms.rankm_plus(x)), want);
                }
            }
            for i in points(rng, 0, o.len() + 1, probes) {
                out.expect(|| format!("selectm({i})"), ok(ms.selectm(i)), o.selectm(i));
            }
        }
        (Structure::Multidict(d), Reference::Multidict(o)) => {
            let s = o.num_sets();
            let sets = points(rng, 0, s, probes.map(|p| p / 16 + 1));
            for &i in &sets {
                out.expect(|| format!("md_size({i})"), ok(d.md_size(i)), o.md_size(i));
                let size = o.md_size(i).unwrap_or(0);
                let sub = probes.map(|p| p / 16 + 1);
                for x in points(rng, 0, o.universe(), sub) {
                    let want = o.md_rank(i, x).filter(|_| x < o.universe());
                    out.expect(|| format!("md_rank({i}, {x})"), ok(d.md_rank(i, x)), want);
                }
                for j in points(rng, 0, size + 1, sub) {
                    out.expect(
                        || format!("md_select({i}, {j})"),
                        ok(d.md_select(i, j)),
                        o.md_select(i, j),
                    );
                }
            }
        }
        (Structure::Ktree(t), Reference::Tree(o)) => {
            let n = o.nodes();
            let k = o.arity();
            let sub = probes.map(|p| p / 16 + 1);
            for x in points(rng, 0, n, probes.map(|p| p / 16 + 1)) {
                let valid = x < n;
                let deg = valid.then(|| o.degree(x));
                out.expect(|| format!("degree({x})"), ok(t.degree(x)), deg);
                out.expect(|| format!("parent({x})"), ok(t.parent(x)), o.parent(x));
                for j in points(rng, 0, k, sub) {
                    let ok_args = valid && j < k;
                    let want = ok_args.then(|| o.child_by_label(x, j));
                    out.expect(
                        || format!("child_by_label({x}, {j})"),
                        ok(t.child_by_label(x, j)),
                        want,
                    );
                    let want = ok_args.then(|| o.ordinal_of_child(x, j));
                    out.expect(
                        || format!("ordinal_of_child({x}, {j})"),
                        ok(t.ordinal_of_child(x, j)),
                        want,
                    );
                }
                for i in points(rng, 0, deg.unwrap_or(0) + 1, sub) {
                    let want = o.ith_child(x, i).filter(|_| valid);
                    out.expect(
                        || format!("ith_child({x}, {i})"),
                        ok(t.ith_child(x, i)),
                        want,
                    );
                }
            }
        }
        _ => out
            .mismatches
            .push(format!("reference does not match a {} structure", s.kind())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gen;
    use crate::rrrfid::RrrFid;

    #[test]
    fn detects_a_wrong_reference() {
        let s = Structure::Rrr(RrrFid::build(&[1, 4], 8).unwrap());
        let good = Reference::decode(&s).unwrap();
        let mut rng = gen::rng(0);
        assert!(check(&s, &good, &mut rng, None).passed());
        let bad = Reference::Set(NaiveSet::new(vec![1, 5], 8).unwrap());
        assert!(!check(&s, &bad, &mut rng, None).passed());
    }

    #[test]
    fn random_instances_check_out() {
        let mut rng = gen::rng(5);
        for kind in Kind::ALL {
            for i in 0..20 {
                let s = random_structure(kind, &mut rng, 1 << 20, 1 << 10, i).unwrap();
                assert_eq!(s.kind(), kind);
                let r = Reference::decode(&s).unwrap();
                let out = check(&s, &r, &mut rng, Some(64));
                assert!(out.passed(), "{kind}: {:?}", out.mismatches);
            }
        }
    }

    #[test]
    fn log_uniform_stays_in_range() {
        let mut rng = gen::rng(1);
        for (lo, hi) in [(0, 0), (1, 1), (0, 5), (3, 1000), (1, u64::MAX >> 1)] {
            for _ in 0..200 {
                let v = log_uniform(&mut rng, lo, hi);
                assert!(lo <= v && v <= hi);
            }
        }
    }
}
