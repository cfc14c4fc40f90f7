//! Query latency and size measurements over a grid of universe sizes.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::bitcore::BitVector;
use crate::error::{Error, Result};
use crate::format::{Kind, Structure};
use crate::idict::{MainDict, SelectOnlySet};
use crate::ktree::CardinalTree;
use crate::multidict::PairDict;
use crate::multiset::IndexableMultiset;
use crate::oracle::gen;
use crate::prefixsum::SearchablePrefixSum;
use crate::rankselect::{Fid, RsDirectory};
use crate::rrrfid::RrrFid;

/// Queries timed together; per-query latency is the batch time over this.
pub const BATCH: usize = 1024;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub kind: String,
    pub lg_m: u32,
    pub m: u64,
    pub n: u64,
    pub size_bits: u64,
    pub query: &'static str,
    pub queries: u64,
    pub median_ns: f64,
    pub p99_ns: f64,
    pub build_ms: f64,
}

/// Parses `A..B`, `A..B:STEP` or `A,B,C` into exponents of two.
pub fn parse_grid(grid: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidInput(format!("bad grid {grid:?}; use A..B, A..B:STEP or A,B,C"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    let out: Vec<u32> = if let Some((a, rest)) = grid.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (num(b)?, num(st)?),
            None => (num(rest)?, 1),
        };
        if step == 0 {
            return Err(bad());
        }
        (num(a)?..=b).step_by(step as usize).collect()
    } else {
        grid.split(',').map(num).collect::<Result<_>>()?
    };
    if out.is_empty() || out.iter().any(|&e| e == 0 || e > 40) {
        return Err(bad());
    }
    Ok(out)
}

/// Median and 99th percentile of per-query latency over timed batches.
pub fn time_queries(args: &[u64], total: u64, mut q: impl FnMut(u64) -> u64) -> (f64, f64) {
    assert!(!args.is_empty());
    let mut acc = 0u64;
    for &a in args.iter().take(BATCH * 64) {
        acc = acc.wrapping_add(q(a));
    }
    let batches = (total as usize).div_ceil(BATCH).max(1);
    let mut per_query = Vec::with_capacity(batches);
    let mut pos = 0usize;
    for _ in 0..batches {
        let start = Instant::now();
        for _ in 0..BATCH {
            acc = acc.wrapping_add(q(args[pos]));
            pos += 1;
            if pos == args.len() {
                pos = 0;
            }
        }
        let t: Duration = start.elapsed();
        per_query.push(t.as_nanos() as f64 / BATCH as f64);
    }
    black_box(acc);
    per_query.sort_by(f64::total_cmp);
    let at = |f: f64| per_query[((per_query.len() - 1) as f64 * f).round() as usize];
    (at(0.5), at(0.99))
}

fn half_density_bits(rng: &mut impl Rng, m: u64) -> BitVector {
    let words: Vec<u64> = (0..m.div_ceil(64)).map(|_| rng.gen()).collect();
    BitVector::from_words(words, m as usize).expect("length fits")
}

/// Builds a random instance of `kind` at universe `2^lg_m` and times its
/// main query over `queries` random arguments.
pub fn bench(kind: Kind, lg_m: u32, seed: u64, queries: u64) -> Result<BenchRow> {
    let m = 1u64 << lg_m;
    let mut rng = gen::rng(seed ^ (lg_m as u64) << 32);
    let nargs = (queries as usize).clamp(BATCH, 1 << 20);
    let t0 = Instant::now();
    let (structure, query): (Structure, &'static str) = match kind {
        Kind::Plain => (
            Structure::Plain(RsDirectory::from_bitvector(&half_density_bits(&mut rng, m))),
            "rank1",
        ),
        Kind::Rrr => (
            Structure::Rrr(RrrFid::from_bitvector(
                &half_density_bits(&mut rng, m),
                crate::rrrfid::default_block_width(m),
            )?),
            "rank1",
        ),
        Kind::Id => {
            let keys = gen::set(&mut rng, m >> 6, m);
            (Structure::Id(MainDict::build(&keys, m, seed)?), "rank")
        }
        Kind::SelectOnly => {
            let keys = gen::set(&mut rng, m >> 6, m);
            (
                Structure::SelectOnly(SelectOnlySet::build(&keys, m)?),
                "select",
            )
        }
        Kind::Psum => {
            let xs: Vec<u64> = (0..m >> 2).map(|_| rng.gen_range(0..8)).collect();
            (Structure::Psum(SearchablePrefixSum::build(&xs)), "sum")
        }
        Kind::Multiset => {
            let v = gen::multiset(&mut rng, m >> 4, m);
            (
                Structure::Multiset(IndexableMultiset::build(&v, m, seed)?),
                "selectm",
            )
        }
        Kind::Multidict => {
            let s = (m >> 8).max(1);
            let per = m >> 4;
            let mut sets = vec![Vec::new(); s as usize];
            for _ in 0..s * 4 {
                let i = rng.gen_range(0..s) as usize;
                sets[i].push(rng.gen_range(0..per));
            }
            for set in &mut sets {
                set.sort_unstable();
                set.dedup();
            }
            (
                Structure::Multidict(PairDict::build(&sets, per, seed)?),
                "md_rank",
            )
        }
        Kind::Ktree => {
            let n = (m >> 4).max(2);
            let edges = gen::tree(&mut rng, n, 4);
            (
                Structure::Ktree(CardinalTree::build(n, 4, &edges, seed)?),
                "parent",
            )
        }
    };
    let build_ms = t0.elapsed().as_secs_f64() * 1e3;
    let n = structure.n();
    let size_bits = structure.to_parts().section_bits();
    let (median_ns, p99_ns) = match &structure {
        Structure::Plain(d) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(0..m)).collect();
            time_queries(&args, queries, |x| d.rank1_unchecked(x))
        }
        Structure::Rrr(f) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(0..m)).collect();
            time_queries(&args, queries, |x| f.rank1_unchecked(x))
        }
        Structure::Id(d) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(0..m)).collect();
            time_queries(&args, queries, |x| d.rank_unchecked(x) as u64)
        }
        Structure::SelectOnly(so) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(1..=so.len())).collect();
            time_queries(&args, queries, |i| so.select_unchecked(i))
        }
        Structure::Psum(p) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(1..=p.len())).collect();
            time_queries(&args, queries, |i| p.sum_unchecked(i))
        }
        Structure::Multiset(ms) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(1..=ms.len())).collect();
            time_queries(&args, queries, |i| ms.selectm(i).unwrap_or(0))
        }
        Structure::Multidict(d) => {
            let s = d.num_sets();
            let u = d.universe();
            let args: Vec<u64> = (0..nargs)
                .map(|_| rng.gen_range(0..s) << 32 | rng.gen_range(0..u))
                .collect();
            time_queries(&args, queries, |a| {
                d.md_rank(a >> 32, a & 0xFFFF_FFFF).unwrap_or(0) as u64
            })
        }
        Structure::Ktree(t) => {
            let args: Vec<u64> = (0..nargs).map(|_| rng.gen_range(1..t.nodes())).collect();
            time_queries(&args, queries, |i| t.parent(i).unwrap_or(0))
        }
    };
    Ok(BenchRow {
        kind: kind.name().to_string(),
        lg_m,
        m,
        n,
        size_bits,
        query,
        queries,
        median_ns,
        p99_ns,
        build_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("20..26").unwrap(), (20..=26).collect::<Vec<_>>());
        assert_eq!(parse_grid("20..26:3").unwrap(), [20, 23, 26]);
        assert_eq!(parse_grid("8,12").unwrap(), [8, 12]);
        assert!(parse_grid("x").is_err());
        assert!(parse_grid("0..3").is_err());
    }

    #[test]
    fn every_kind_runs() {
        for k in Kind::ALL {
            let r = bench(k, 12, 1, 4096).unwrap();
            assert!(r.median_ns > 0.0 && r.size_bits > 0, "{k}");
        }
    }
}
