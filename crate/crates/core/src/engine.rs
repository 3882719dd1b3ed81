//! Interchangeable path-computation engines, registered by name.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use crate::baseline::{build_sr_graph, solve_clique_with_stats, SrGraph};
use crate::oracle::enumerate_all;
use crate::pathfinder::{
    collect_solutions, search_uncounted, DiversityMode, Dominance, ExtendedDominance, Query,
    SearchStats, Solutions, TightDominance,
};
use crate::segdb::{build_segment_db, SegmentDb};
use crate::topo::Topology;

/// Shared, immutable per-topology state.
#[derive(Debug)]
pub struct Context {
    pub topo: Topology,
    pub db: SegmentDb,
    sr: OnceLock<SrGraph>,
}

impl Context {
    pub fn new(topo: Topology) -> Self {
        let db = build_segment_db(&topo);
        Context {
            topo,
            db,
            sr: OnceLock::new(),
        }
    }

    /// Clique transform, built on first use.
    pub fn sr_graph(&self) -> &SrGraph {
        self.sr.get_or_init(|| build_sr_graph(&self.db, &self.topo))
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub solutions: Solutions,
    pub stats: SearchStats,
    /// Wall time of the search and solution extraction, excluding
    /// instrumentation.
    pub elapsed_ns: u128,
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;

    /// Precomputation shared by all queries; excluded from query timing.
    fn prepare(&self, _ctx: &Context) {}

    fn run(&self, ctx: &Context, q: &Query) -> Outcome;
}

/// On-the-fly encoding with a pluggable front dominance.
pub struct LabelSettingEngine<D> {
    name: &'static str,
    dominance: D,
}

impl<D: Dominance> LabelSettingEngine<D> {
    pub fn new(name: &'static str, dominance: D) -> Self {
        LabelSettingEngine { name, dominance }
    }
}

impl<D: Dominance> Engine for LabelSettingEngine<D> {
    fn name(&self) -> &'static str {
        self.name
    }

    fn run(&self, ctx: &Context, q: &Query) -> Outcome {
        let start = Instant::now();
        let mut run = search_uncounted(&ctx.db, &ctx.topo, q, &self.dominance);
        let solutions = collect_solutions(&run, &ctx.topo, q);
        let elapsed_ns = start.elapsed().as_nanos();
        run.count_plain_fronts();
        Outcome {
            solutions,
            stats: run.stats,
            elapsed_ns,
        }
    }
}

/// Label setting with the front relation picked by the query's diversity
/// mode, as in [`crate::pathfinder::solve`].
pub struct RoutourneEngine;

impl Engine for RoutourneEngine {
    fn name(&self) -> &'static str {
        "routourne"
    }

    fn run(&self, ctx: &Context, q: &Query) -> Outcome {
        match q.diversity {
            DiversityMode::Standard => {
                LabelSettingEngine::new("routourne", TightDominance).run(ctx, q)
            }
            DiversityMode::MaxDiversity => {
                LabelSettingEngine::new("routourne", ExtendedDominance).run(ctx, q)
            }
        }
    }
}

pub struct CliqueEngine;

impl Engine for CliqueEngine {
    fn name(&self) -> &'static str {
        "clique"
    }

    fn prepare(&self, ctx: &Context) {
        ctx.sr_graph();
    }

    fn run(&self, ctx: &Context, q: &Query) -> Outcome {
        let g = ctx.sr_graph();
        let start = Instant::now();
        let (solutions, stats) = solve_clique_with_stats(g, &ctx.topo, q);
        Outcome {
            solutions,
            stats,
            elapsed_ns: start.elapsed().as_nanos(),
        }
    }
}

pub struct OracleEngine;

impl Engine for OracleEngine {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn run(&self, ctx: &Context, q: &Query) -> Outcome {
        let start = Instant::now();
        let mut solutions = enumerate_all(&ctx.db, &ctx.topo, q.src, q.msd, q.delay_bound);
        if let Some(d) = q.dst {
            solutions.retain(|&k, _| k == d);
        }
        Outcome {
            solutions,
            stats: SearchStats::default(),
            elapsed_ns: start.elapsed().as_nanos(),
        }
    }
}

#[derive(Default, Clone)]
pub struct Registry {
    engines: BTreeMap<&'static str, Arc<dyn Engine>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `routourne`, `routourne-ext`, `clique` and `oracle`.
    pub fn with_defaults() -> Self {
        let mut r = Registry::new();
        r.register(Arc::new(RoutourneEngine));
        r.register(Arc::new(LabelSettingEngine::new(
            "routourne-ext",
            ExtendedDominance,
        )));
        r.register(Arc::new(CliqueEngine));
        r.register(Arc::new(OracleEngine));
        r
    }

    pub fn register(&mut self, engine: Arc<dyn Engine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Engine>> {
        self.engines.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.engines.keys().copied()
    }
}
