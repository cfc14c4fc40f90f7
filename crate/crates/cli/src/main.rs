use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sidx::bench::{bench, parse_grid};
use sidx::check::{check, random_structure, CheckOutcome, Reference};
use sidx::format::{Kind, Structure, StructureFile};
use sidx::idict::{MainDict, SelectOnlySet};
use sidx::ktree::CardinalTree;
use sidx::multidict::Digraph;
use sidx::multiset::IndexableMultiset;
use sidx::oracle::gen;
use sidx::prefixsum::SearchablePrefixSum;
use sidx::rankselect::{Fid, RsDirectory};
use sidx::rrrfid::RrrFid;
use sidx::stats::StatsReport;

mod input;

#[derive(Parser)]
#[command(
    name = "sidx",
    version,
    about = "Succinct dictionaries, prefix sums, multisets and trees"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a structure from a text file and save it.
    Build(BuildArgs),
    /// Answer one query against a saved structure.
    Query {
        file: PathBuf,
        op: String,
        args: Vec<String>,
    },
    /// Print the space breakdown of a saved structure.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare a structure, or random instances, with the reference oracles.
    Selftest(SelftestArgs),
    /// Time the main query of a kind over a grid of universe sizes.
    Bench {
        #[arg(long)]
        kind: Kind,
        /// Exponents of two: `A..B`, `A..B:STEP` or `A,B,C`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        queries: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    kind: Kind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    universe: Option<u64>,
    /// Block width of the compressed bit vector (rrr only).
    #[arg(long)]
    block_width: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SelftestArgs {
    file: Option<PathBuf>,
    /// Number of random instances, spread over all kinds.
    #[arg(long, conflicts_with = "file")]
    random: Option<u64>,
    #[arg(long, default_value_t = 1 << 16)]
    universe: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure with its exit code.
#[derive(Debug)]
enum Fail {
    Usage(String),
    Input(String),
    Corrupt(String),
    Check(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 1,
            Fail::Input(_) => 2,
            Fail::Corrupt(_) => 3,
            Fail::Check(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Usage(m) | Fail::Input(m) | Fail::Corrupt(m) | Fail::Check(m) => m,
        }
    }
}

impl From<sidx::Error> for Fail {
    fn from(e: sidx::Error) -> Self {
        match e {
            sidx::Error::Corrupt(_) => Fail::Corrupt(e.to_string()),
            _ => Fail::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Fail>;

/// Writes to stdout; a closed pipe ends the process quietly.
fn write_out(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

macro_rules! out {
    ($($t:tt)*) => { write_out(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { write_out(format_args!("{}\n", format_args!($($t)*))) };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Build(a) => cmd_build(&a),
        Cmd::Query { file, op, args } => cmd_query(&file, &op, &args),
        Cmd::Stats { file, json } => cmd_stats(&file, json),
        Cmd::Selftest(a) => cmd_selftest(&a),
        Cmd::Bench {
            kind,
            grid,
            queries,
            seed,
            json,
        } => cmd_bench(kind, &grid, queries, seed, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sidx: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load(path: &Path) -> CliResult<StructureFile> {
    let bytes = std::fs::read(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))?;
    Ok(StructureFile::from_bytes(&bytes)?)
}

fn cmd_build(a: &BuildArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| Fail::Input(format!("{}: {e}", a.input.display())))?;
    let name = a.input.display().to_string();
    if a.block_width.is_some() && a.kind != Kind::Rrr {
        return Err(Fail::Usage(
            "--block-width applies to --kind rrr only".into(),
        ));
    }
    if a.universe.is_some() && matches!(a.kind, Kind::Psum | Kind::Ktree) {
        return Err(Fail::Usage(format!(
            "--universe does not apply to {}",
            a.kind
        )));
    }
    let structure = build_structure(a, &name, &text)?;
    let file = StructureFile::new(structure, a.seed);
    file.save(&a.out)
        .map_err(|e| Fail::Input(format!("{}: {e}", a.out.display())))?;
    out!("{}", StatsReport::of(&file.structure)?.to_text());
    Ok(())
}

fn build_structure(a: &BuildArgs, name: &str, text: &str) -> CliResult<Structure> {
    let seed = a.seed;
    Ok(match a.kind {
        Kind::Plain | Kind::Rrr | Kind::Id | Kind::SelectOnly => {
            let keys = input::sorted_values(name, text, true)?;
            let m = a.universe.unwrap_or_else(|| input::span(&keys));
            match a.kind {
                Kind::Plain => Structure::Plain(RsDirectory::build(&keys, m)?),
                Kind::Rrr => Structure::Rrr(match a.block_width {
                    Some(u) => RrrFid::build_with(&keys, m, u)?,
                    None => RrrFid::build(&keys, m)?,
                }),
                Kind::Id => Structure::Id(MainDict::build(&keys, m, seed)?),
                _ => Structure::SelectOnly(SelectOnlySet::build(&keys, m)?),
            }
        }
        Kind::Multiset => {
            let values = input::sorted_values(name, text, false)?;
            let m = a.universe.unwrap_or_else(|| input::span(&values));
            Structure::Multiset(IndexableMultiset::build(&values, m, seed)?)
        }
        Kind::Psum => {
            let xs = input::values(name, text)?;
            Structure::Psum(SearchablePrefixSum::build(&xs))
        }
        Kind::Multidict => {
            let edges = input::edges(name, text)?;
            let vertices = a
                .universe
                .unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1));
            Structure::Multidict(Digraph::build(vertices, &edges, seed)?.pairs().clone())
        }
        Kind::Ktree => {
            let (n, k, edges) = input::tree(name, text)?;
            Structure::Ktree(CardinalTree::build(n, k, &edges, seed)?)
        }
    })
}

/// A query answer: a number, a signed rank where -1 means absent, an
/// optional value, or a membership bit.
enum Answer {
    Num(u64),
    Rank(i64),
    Maybe(Option<u64>),
    Bit(bool),
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Answer::Num(v) => write!(f, "{v}"),
            Answer::Rank(r) => write!(f, "{r}"),
            Answer::Maybe(Some(v)) => write!(f, "{v}"),
            Answer::Maybe(None) => f.write_str("absent"),
            Answer::Bit(b) => f.write_str(if *b { "1" } else { "0" }),
        }
    }
}

fn ops_for(kind: Kind) -> &'static [(&'static str, usize)] {
    match kind {
        Kind::Plain | Kind::Rrr => &[
            ("access", 1),
            ("rank1", 1),
            ("rank0", 1),
            ("rank", 1),
            ("select1", 1),
            ("select0", 1),
            ("select", 1),
        ],
        Kind::Id => &[("rank", 1), ("select", 1), ("member", 1)],
        Kind::SelectOnly => &[("select", 1)],
        Kind::Psum => &[("sum", 1), ("pred", 1)],
        Kind::Multiset => &[("rankm", 1), ("rankm_plus", 1), ("selectm", 1)],
        Kind::Multidict => &[("size", 1), ("rank", 2), ("select", 2), ("member", 2)],
        Kind::Ktree => &[
            ("child", 2),
            ("parent", 1),
            ("label", 1),
            ("degree", 1),
            ("ith_child", 2),
            ("ordinal", 2),
        ],
    }
}

fn usage_for(kind: Kind) -> String {
    let ops: Vec<String> = ops_for(kind)
        .iter()
        .map(|(op, k)| format!("{op}/{k}"))
        .collect();
    format!("operations for {kind}: {}", ops.join(", "))
}

fn cmd_query(path: &Path, op: &str, args: &[String]) -> CliResult<()> {
    let file = load(path)?;
    let kind = file.kind();
    let arity = ops_for(kind)
        .iter()
        .find(|(name, _)| *name == op)
        .map(|&(_, k)| k)
        .ok_or_else(|| Fail::Usage(format!("unknown operation {op:?}; {}", usage_for(kind))))?;
    if args.len() != arity {
        return Err(Fail::Usage(format!(
            "{op} takes {arity} argument(s), got {}",
            args.len()
        )));
    }
    let nums: Vec<u64> = args
        .iter()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Fail::Usage(format!("argument {s:?} is not an unsigned integer")))
        })
        .collect::<CliResult<_>>()?;
    let x = nums[0];
    let y = nums.get(1).copied().unwrap_or(0);
    let answer = match (&file.structure, op) {
        (Structure::Plain(_) | Structure::Rrr(_), _) => {
            let f: &dyn Fid = match &file.structure {
                Structure::Plain(d) => d,
                Structure::Rrr(r) => r,
                _ => unreachable!(),
            };
            match op {
                "access" => Answer::Bit(f.access(x)?),
                "rank1" => Answer::Num(f.rank1(x)?),
                "rank0" => Answer::Num(f.rank0(x)?),
                "rank" => Answer::Rank(f.set_rank(x)?),
                "select0" => Answer::Num(f.select0(x)?),
                _ => Answer::Num(f.select1(x)?),
            }
        }
        (Structure::Id(d), "rank") => Answer::Rank(d.rank(x)?),
        (Structure::Id(d), "select") => Answer::Num(d.select(x)?),
        (Structure::Id(d), _) => Answer::Bit(d.rank(x)? >= 0),
        (Structure::SelectOnly(s), _) => Answer::Num(s.select(x)?),
        (Structure::Psum(p), "sum") => Answer::Num(p.sum(x)?),
        (Structure::Psum(p), _) => Answer::Num(p.pred(x)?),
        (Structure::Multiset(ms), "rankm") => Answer::Rank(ms.rankm(x)?),
        (Structure::Multiset(ms), "rankm_plus") => Answer::Num(ms.rankm_plus(x)?),
        (Structure::Multiset(ms), _) => Answer::Num(ms.selectm(x)?),
        (Structure::Multidict(d), "size") => Answer::Num(d.md_size(x)?),
        (Structure::Multidict(d), "rank") => Answer::Rank(d.md_rank(x, y)?),
        (Structure::Multidict(d), "select") => Answer::Num(d.md_select(x, y)?),
        (Structure::Multidict(d), _) => Answer::Bit(d.md_rank(x, y)? >= 0),
        (Structure::Ktree(t), "child") => Answer::Maybe(t.child_by_label(x, y)?),
        (Structure::Ktree(t), "parent") => Answer::Num(t.parent(x)?),
        (Structure::Ktree(t), "label") => Answer::Num(t.label(x)?),
        (Structure::Ktree(t), "degree") => Answer::Num(t.degree(x)?),
        (Structure::Ktree(t), "ith_child") => Answer::Num(t.ith_child(x, y)?),
        (Structure::Ktree(t), _) => Answer::Maybe(t.ordinal_of_child(x, y)?),
    };
    outln!("{answer}");
    Ok(())
}

fn cmd_stats(path: &Path, json: bool) -> CliResult<()> {
    let file = load(path)?;
    let report = StatsReport::of(&file.structure)?;
    if json {
        outln!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        out!("{}", report.to_text());
    }
    Ok(())
}

/// Exhaustive below this universe, sampled above.
const EXHAUSTIVE_LIMIT: u64 = 1 << 12;
const FILE_PROBES: u64 = 100_000;
const RANDOM_PROBES: u64 = 256;
const RANDOM_MAX_N: u64 = 1 << 12;

fn cmd_selftest(a: &SelftestArgs) -> CliResult<()> {
    if let Some(path) = &a.file {
        let file = load(path)?;
        let s = &file.structure;
        let reference = Reference::decode(s)?;
        let probes = (s.m().max(s.n()) > EXHAUSTIVE_LIMIT).then_some(FILE_PROBES);
        let mut rng = gen::rng(a.seed);
        let out = check(s, &reference, &mut rng, probes);
        return report_check(&format!("{} n={} m={}", s.kind(), s.n(), s.m()), &out);
    }
    let count = a
        .random
        .ok_or_else(|| Fail::Usage("selftest needs a FILE or --random N".into()))?;
    if a.universe == 0 {
        return Err(Fail::Usage("--universe must be positive".into()));
    }
    let mut rng = gen::rng(a.seed);
    let mut failed = false;
    for (k, kind) in Kind::ALL.into_iter().enumerate() {
        let share =
            count / Kind::ALL.len() as u64 + u64::from((k as u64) < count % Kind::ALL.len() as u64);
        let mut total = CheckOutcome::default();
        for i in 0..share {
            let s = random_structure(kind, &mut rng, a.universe, RANDOM_MAX_N, a.seed ^ i)?;
            let reference = Reference::decode(&s)?;
            let probes = (s.m().max(s.n()) > EXHAUSTIVE_LIMIT).then_some(RANDOM_PROBES);
            total.merge(check(&s, &reference, &mut rng, probes));
        }
        let label = format!("{kind} instances={share}");
        failed |= report_check(&label, &total).is_err();
    }
    if failed {
        return Err(Fail::Check("selftest failed".into()));
    }
    Ok(())
}

fn report_check(label: &str, out: &CheckOutcome) -> CliResult<()> {
    if out.passed() {
        outln!("PASS {label} queries={}", out.queries);
        return Ok(());
    }
    outln!(
        "FAIL {label} queries={} mismatches(shown)={}",
        out.queries,
        out.mismatches.len()
    );
    for m in &out.mismatches {
        outln!("  {m}");
    }
    Err(Fail::Check(format!(
        "{label}: mismatches against the oracle"
    )))
}

fn cmd_bench(kind: Kind, grid: &str, queries: u64, seed: u64, json: bool) -> CliResult<()> {
    let exps = parse_grid(grid).map_err(|e| Fail::Usage(e.to_string()))?;
    let mut rows = Vec::with_capacity(exps.len());
    for lg in exps {
        let row = bench(kind, lg, seed, queries)?;
        if !json {
            outln!(
                "{} 2^{:<2} n={:<10} bits={:<12} {} median={:.1}ns p99={:.1}ns build={:.1}ms",
                row.kind,
                row.lg_m,
                row.n,
                row.size_bits,
                row.query,
                row.median_ns,
                row.p99_ns,
                row.build_ms
            );
        }
        rows.push(row);
    }
    if json {
        outln!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("rows serialize")
        );
    }
    Ok(())
}
