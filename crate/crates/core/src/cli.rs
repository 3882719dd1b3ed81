//! `srpf` command-line frontend.
//!
//! Exit codes: 0 success, 1 bad flags, 2 topology read/parse error,
//! 3 unknown node name, 4 engine mismatch in `oracle-check`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{bench_csv, oracle_check, run_bench, BenchConfig, PairSelection};
use crate::engine::{Context, Registry};
use crate::pathfinder::{DiversityMode, Query, Solutions, DEFAULT_MSD};
use crate::topo::{generate_random, parse_topology, NodeId, RandomSpec, Topology};

pub const EXIT_FLAGS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NODE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "srpf",
    version,
    about = "Deployable segment-list path computation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute Pareto-optimal segment lists from one source.
    Solve(SolveArgs),
    /// Time engines over many queries and report CSV.
    Bench(BenchArgs),
    /// Cross-check every engine against brute force on random instances.
    OracleCheck(CheckArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    topo: PathBuf,
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: Option<String>,
    /// Delay upper bound in microseconds.
    #[arg(long)]
    delay_bound: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MSD, value_parser = clap::value_parser!(u32).range(1..))]
    msd: u32,
    /// Engine: routourne, routourne-ext, clique or oracle.
    #[arg(long, default_value = "routourne")]
    mode: String,
    /// List every deployable list of each optimal distance.
    #[arg(long)]
    diversity: bool,
    /// Print the segment database as CSV on stderr.
    #[arg(long)]
    dump_segdb: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, conflicts_with = "random_n")]
    topo: Option<PathBuf>,
    #[arg(long)]
    random_n: Option<usize>,
    #[arg(long, default_value_t = 4.0)]
    avg_degree: f64,
    #[arg(long, env = "SRPF_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    cost_min: u32,
    #[arg(long, default_value_t = 5)]
    cost_max: u32,
    #[arg(long, default_value_t = 1)]
    delay_min: u32,
    #[arg(long, default_value_t = 10)]
    delay_max: u32,
    /// Number of sampled pairs, or `all`.
    #[arg(long, default_value = "10")]
    pairs: PairSelection,
    #[arg(long)]
    delay_bound_factor: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MSD, value_parser = clap::value_parser!(u32).range(1..))]
    msd: u32,
    /// Comma-separated engine names.
    #[arg(long, value_delimiter = ',', default_value = "routourne,clique")]
    modes: Vec<String>,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Largest instance size.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..=8))]
    n: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=4))]
    msd: u32,
    #[arg(long, env = "SRPF_SEED", default_value_t = 1)]
    seed: u64,
}

struct Failure {
    code: i32,
    msg: String,
}

fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

fn load(path: &PathBuf) -> Result<Topology, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    parse_topology(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn node(topo: &Topology, name: &str) -> Result<NodeId, Failure> {
    topo.node_id(name)
        .ok_or_else(|| fail(EXIT_NODE, format!("unknown node `{name}`")))
}

/// Solutions as CSV sorted by (dst name, cost, delay, nsegs, list).
pub fn solutions_csv(topo: &Topology, sols: &Solutions) -> String {
    let mut rows: Vec<(&str, (u64, u64, u32), String)> = sols
        .iter()
        .flat_map(|(&d, v)| {
            v.iter()
                .map(move |s| (topo.name(d), s.triple(), s.list.display(topo).to_string()))
        })
        .collect();
    rows.sort();
    let mut out = String::from("dst,cost,delay,nsegs,segment_list\n");
    for (d, (c, dl, k), list) in rows {
        let _ = writeln!(out, "{d},{c},{dl},{k},{list}");
    }
    out
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let registry = Registry::with_defaults();
    let engine = registry
        .get(&a.mode)
        .ok_or_else(|| fail(EXIT_FLAGS, format!("unknown mode `{}`", a.mode)))?;
    let topo = load(&a.topo)?;
    let src = node(&topo, &a.src)?;
    let dst = a.dst.as_deref().map(|d| node(&topo, d)).transpose()?;
    let ctx = Context::new(topo);
    if a.dump_segdb {
        let _ = err.write_all(ctx.db.to_csv(&ctx.topo).as_bytes());
    }
    let diversity = if a.diversity {
        DiversityMode::MaxDiversity
    } else {
        DiversityMode::Standard
    };
    let q = Query::new(src, dst)
        .with_bound(a.delay_bound)
        .with_msd(a.msd)
        .with_diversity(diversity);
    let outcome = engine.run(&ctx, &q);
    out.write_all(solutions_csv(&ctx.topo, &outcome.solutions).as_bytes())
        .map_err(|e| fail(EXIT_FLAGS, e.to_string()))
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (topo, instance) = match (&a.topo, a.random_n) {
        (Some(path), _) => {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "topo".into());
            (load(path)?, name)
        }
        (None, Some(n)) => {
            let spec = RandomSpec {
                n,
                avg_degree: a.avg_degree,
                cost_range: (a.cost_min, a.cost_max),
                delay_range: (a.delay_min, a.delay_max),
                seed: a.seed,
            };
            let topo = generate_random(&spec).map_err(|e| fail(EXIT_FLAGS, e.to_string()))?;
            (topo, format!("random-n{n}-d{}-s{}", a.avg_degree, a.seed))
        }
        (None, None) => return Err(fail(EXIT_FLAGS, "either --topo or --random-n is required")),
    };
    let cfg = BenchConfig {
        pairs: a.pairs,
        delay_bound_factor: a.delay_bound_factor,
        msd: a.msd,
        modes: a.modes,
        repeat: a.repeat,
        parallel: a.parallel,
        seed: a.seed,
    };
    let ctx = Context::new(topo);
    let rows = run_bench(&ctx, &instance, &cfg, &Registry::with_defaults())
        .map_err(|e| fail(EXIT_FLAGS, e.to_string()))?;
    out.write_all(bench_csv(&ctx.topo, &rows).as_bytes())
        .map_err(|e| fail(EXIT_FLAGS, e.to_string()))
}

fn cmd_oracle_check(a: CheckArgs, out: &mut dyn Write) -> Result<(), Failure> {
    match oracle_check(a.count, a.n as usize, a.msd, a.seed) {
        Ok(s) => {
            let _ = writeln!(out, "pass: {} instances, {} pairs", s.instances, s.pairs);
            Ok(())
        }
        Err(m) => {
            let _ = writeln!(out, "FAIL: {m}");
            Err(fail(EXIT_MISMATCH, "engines disagree"))
        }
    }
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_FLAGS } else { 0 };
        }
    };
    let res = match cli.cmd {
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Bench(a) => cmd_bench(a, out),
        Command::OracleCheck(a) => cmd_oracle_check(a, out),
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
