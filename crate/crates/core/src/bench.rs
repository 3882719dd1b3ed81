//! Benchmark harness and randomized cross-engine checking.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{Context, Engine, Registry};
use crate::pareto::Triple;
use crate::pathfinder::{Query, Solutions};
use crate::segdb::INF;
use crate::topo::{generate_random, NodeId, RandomSpec, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    Count(usize),
    All,
}

impl FromStr for PairSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(PairSelection::All);
        }
        s.parse()
            .map(PairSelection::Count)
            .map_err(|_| format!("expected a pair count or `all`, got `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub pairs: PairSelection,
    /// Bound = factor x least achievable delay of the pair; `None` = unbounded.
    pub delay_bound_factor: Option<f64>,
    pub msd: u32,
    pub modes: Vec<String>,
    pub repeat: usize,
    pub parallel: bool,
    /// Drives pair sampling.
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            pairs: PairSelection::Count(10),
            delay_bound_factor: None,
            msd: crate::pathfinder::DEFAULT_MSD,
            modes: vec!["routourne".into(), "clique".into()],
            repeat: 1,
            parallel: false,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub mode: String,
    pub runtime_ns: u128,
    pub labels_pushed: u64,
    pub labels_stored: u64,
    pub front_overhead_ratio: f64,
}

pub const BENCH_HEADER: &str =
    "instance,src,dst,mode,runtime_ns,labels_pushed,labels_stored,front_overhead_ratio";

impl BenchRow {
    pub fn to_csv(&self, topo: &Topology) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.4}",
            self.instance,
            topo.name(self.src),
            topo.name(self.dst),
            self.mode,
            self.runtime_ns,
            self.labels_pushed,
            self.labels_stored,
            self.front_overhead_ratio
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
}

/// Ordered `(src, dst)` pairs with `src != dst`: all of them, or `k`
/// distinct ones sampled with `seed`.
pub fn select_pairs(topo: &Topology, sel: PairSelection, seed: u64) -> Vec<(NodeId, NodeId)> {
    let n = topo.node_count();
    let mut all: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
        .collect();
    match sel {
        PairSelection::All => all,
        PairSelection::Count(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            all.shuffle(&mut rng);
            all.truncate(k);
            all
        }
    }
}

/// Least physical-path delay from `src` to every node. Any physical path is
/// deployable given enough adjacency segments, so this is the least
/// achievable guaranteed delay without depth limit.
pub fn min_delays(topo: &Topology, src: NodeId) -> Vec<u64> {
    let mut dist = vec![INF; topo.node_count()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &ei in topo.out_edges(u) {
            let e = topo.edge(ei);
            let nd = d + e.delay as u64;
            if nd < dist[e.dst] {
                dist[e.dst] = nd;
                heap.push(Reverse((nd, e.dst)));
            }
        }
    }
    dist
}

fn resolve(registry: &Registry, modes: &[String]) -> Result<Vec<Arc<dyn Engine>>, BenchError> {
    modes
        .iter()
        .map(|m| {
            registry
                .get(m)
                .ok_or_else(|| BenchError::UnknownMode(m.clone()))
        })
        .collect()
}

/// Times every (repetition, pair, mode) cell. Segment database and clique
/// construction happen before any query; engines time their own search.
pub fn run_bench(
    ctx: &Context,
    instance: &str,
    cfg: &BenchConfig,
    registry: &Registry,
) -> Result<Vec<BenchRow>, BenchError> {
    let engines = resolve(registry, &cfg.modes)?;
    for e in &engines {
        e.prepare(ctx);
    }
    let pairs = select_pairs(&ctx.topo, cfg.pairs, cfg.seed);
    let queries: Vec<Query> = pairs
        .iter()
        .map(|&(s, d)| {
            let bound = cfg.delay_bound_factor.and_then(|f| {
                let base = min_delays(&ctx.topo, s)[d];
                (base != INF).then(|| (f * base as f64).floor() as u64)
            });
            Query::new(s, Some(d)).with_bound(bound).with_msd(cfg.msd)
        })
        .collect();

    let mut cells: Vec<(usize, &Query, &Arc<dyn Engine>)> = Vec::new();
    for r in 0..cfg.repeat {
        for q in &queries {
            cells.extend(engines.iter().map(|e| (r, q, e)));
        }
    }
    let time = |&(_, q, e): &(usize, &Query, &Arc<dyn Engine>)| {
        let out = e.run(ctx, q);
        BenchRow {
            instance: instance.to_string(),
            src: q.src,
            dst: q.dst.unwrap_or(q.src),
            mode: e.name().to_string(),
            runtime_ns: out.elapsed_ns,
            labels_pushed: out.stats.labels_pushed,
            labels_stored: out.stats.labels_stored,
            front_overhead_ratio: out.stats.front_overhead_ratio(),
        }
    };
    Ok(if cfg.parallel {
        cells.par_iter().map(time).collect()
    } else {
        cells.iter().map(time).collect()
    })
}

pub fn bench_csv(topo: &Topology, rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv(topo));
    }
    out
}

/// Parameters of one randomized cross-check instance.
pub fn check_instance_spec(max_n: usize, seed: u64, index: usize) -> RandomSpec {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index as u64);
    let lo = max_n.clamp(2, 4);
    let n = rng.gen_range(lo..=max_n.max(lo));
    let mut spec = RandomSpec::new(n, 2.5f64.min(n as f64 - 0.5), rng.gen());
    spec.cost_range = (1, 5);
    spec.delay_range = (1, 10);
    spec
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub instance: usize,
    pub topology: String,
    pub src: String,
    pub dst: String,
    /// Triples per engine name.
    pub results: Vec<(String, Vec<Triple>)>,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "mismatch on instance {} for {} -> {}",
            self.instance, self.src, self.dst
        )?;
        for (name, t) in &self.results {
            writeln!(f, "  {name}: {t:?}")?;
        }
        write!(f, "{}", self.topology)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckSummary {
    pub instances: usize,
    pub pairs: usize,
}

fn triples_at(sols: &Solutions, d: NodeId) -> Vec<Triple> {
    let mut v: Vec<Triple> = sols
        .get(&d)
        .map(|s| {
            s.iter()
                .map(|p| p.triple())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

/// Compares routourne (both front relations), clique and oracle triples for every ordered pair of
/// `count` seeded instances; stops at the first disagreement.
pub fn oracle_check(
    count: usize,
    max_n: usize,
    msd: u32,
    seed: u64,
) -> Result<CheckSummary, Box<Mismatch>> {
    let registry = Registry::with_defaults();
    let names = ["routourne", "routourne-ext", "clique", "oracle"];
    let engines: Vec<_> = names.iter().map(|n| registry.get(n).unwrap()).collect();
    let mut summary = CheckSummary::default();
    for i in 0..count {
        let topo =
            generate_random(&check_instance_spec(max_n, seed, i)).expect("feasible parameters");
        let ctx = Context::new(topo);
        let n = ctx.topo.node_count();
        for s in 0..n {
            let q = Query::new(s, None).with_msd(msd);
            let outs: Vec<Solutions> = engines.iter().map(|e| e.run(&ctx, &q).solutions).collect();
            for d in 0..n {
                let res: Vec<Vec<Triple>> = outs.iter().map(|o| triples_at(o, d)).collect();
                summary.pairs += 1;
                if res.iter().any(|r| r != &res[3]) {
                    return Err(Box::new(Mismatch {
                        instance: i,
                        topology: ctx.topo.serialize(),
                        src: ctx.topo.name(s).to_string(),
                        dst: ctx.topo.name(d).to_string(),
                        results: names.iter().map(|n| n.to_string()).zip(res).collect(),
                    }));
                }
            }
        }
        summary.instances += 1;
    }
    Ok(summary)
}
