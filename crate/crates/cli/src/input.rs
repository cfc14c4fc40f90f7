//! Text input formats. Blank lines and lines starting with `#` are skipped;
//! every error names the file and 1-based line.

use crate::Fail;

/// Non-empty, non-comment lines with their line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn bad(name: &str, line: usize, msg: impl std::fmt::Display) -> Fail {
    Fail::Input(format!("{name}:{line}: {msg}"))
}

fn number(name: &str, line: usize, tok: &str) -> Result<u64, Fail> {
    tok.parse().map_err(|_| {
        bad(
            name,
            line,
            format!("expected an unsigned integer, found {tok:?}"),
        )
    })
}

fn fields<const K: usize>(name: &str, line: usize, l: &str) -> Result<[u64; K], Fail> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.len() != K {
        return Err(bad(
            name,
            line,
            format!("expected {K} integers, found {} fields", toks.len()),
        ));
    }
    let mut out = [0u64; K];
    for (o, t) in out.iter_mut().zip(toks) {
        *o = number(name, line, t)?;
    }
    Ok(out)
}

/// One integer per line, in any order.
pub fn values(name: &str, text: &str) -> Result<Vec<u64>, Fail> {
    lines(text)
        .map(|(no, l)| fields::<1>(name, no, l).map(|[v]| v))
        .collect()
}

/// One integer per line, strictly increasing if `strict`, else non-decreasing.
pub fn sorted_values(name: &str, text: &str, strict: bool) -> Result<Vec<u64>, Fail> {
    let mut out: Vec<u64> = Vec::new();
    for (no, l) in lines(text) {
        let [v] = fields::<1>(name, no, l)?;
        if let Some(&prev) = out.last() {
            if v < prev || (strict && v == prev) {
                let want = if strict {
                    "strictly increasing"
                } else {
                    "non-decreasing"
                };
                return Err(bad(
                    name,
                    no,
                    format!("{v} after {prev}; values must be {want}"),
                ));
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Default universe for sorted values: one past the largest, at least 1.
pub fn span(sorted: &[u64]) -> u64 {
    sorted.last().map_or(1, |&v| v.saturating_add(1))
}

/// `u v` per line.
pub fn edges(name: &str, text: &str) -> Result<Vec<(u64, u64)>, Fail> {
    lines(text)
        .map(|(no, l)| fields::<2>(name, no, l).map(|[u, v]| (u, v)))
        .collect()
}

/// Header `n k`, then `n - 1` lines `parent label` for nodes 1..n.
pub fn tree(name: &str, text: &str) -> Result<(u64, u64, Vec<(u64, u64)>), Fail> {
    let mut it = lines(text);
    let (hl, h) = it
        .next()
        .ok_or_else(|| Fail::Input(format!("{name}: empty tree file; expected \"n k\"")))?;
    let [n, k] = fields::<2>(name, hl, h)?;
    if n == 0 || k == 0 {
        return Err(bad(name, hl, "n and k must be positive"));
    }
    let mut edges = Vec::new();
    let mut prev: Option<(u64, u64)> = None;
    let mut last = hl;
    for (no, l) in it {
        let [p, j] = fields::<2>(name, no, l)?;
        let child = edges.len() as u64 + 1;
        if child >= n {
            return Err(bad(name, no, format!("more than n - 1 = {} edges", n - 1)));
        }
        if j >= k {
            return Err(bad(name, no, format!("label {j} not below k = {k}")));
        }
        if p >= child {
            return Err(bad(
                name,
                no,
                format!("parent {p} of node {child} must be an earlier node"),
            ));
        }
        if prev.is_some_and(|q| q >= (p, j)) {
            return Err(bad(
                name,
                no,
                "edges must be in level order: (parent, label) strictly increasing",
            ));
        }
        prev = Some((p, j));
        edges.push((p, j));
        last = no;
    }
    if edges.len() as u64 + 1 != n {
        return Err(bad(
            name,
            last,
            format!("expected {} edges, found {}", n - 1, edges.len()),
        ));
    }
    Ok((n, k, edges))
}
