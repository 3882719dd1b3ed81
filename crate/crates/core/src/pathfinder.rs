//! Multi-metric label-setting search over (cost, delay, segment count) with
//! on-the-fly encoding and per-node fronts under a pluggable dominance
//! relation.
//!
//! Segment count is not isotone: a label that is dominated at a node may
//! still need fewer segments later, because its open segment can be pushed
//! where its dominator's cannot. [`ExtendedDominance`] keeps exactly the
//! labels that may recover: those within one segment of every dominator and
//! whose open segment starts elsewhere.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::encoder::{extend_label, finalize_list, Label, LabelId, OpenKind, SegmentList};
use crate::pareto::{pareto_filter, Triple};
use crate::segdb::SegmentDb;
use crate::topo::{NodeId, Topology};

pub const DEFAULT_MSD: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiversityMode {
    /// One segment list per Pareto-optimal triple.
    #[default]
    Standard,
    /// Every stored list of a Pareto-optimal triple, one per distinct last
    /// detour.
    MaxDiversity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub src: NodeId,
    /// `None` means every destination.
    pub dst: Option<NodeId>,
    pub delay_bound: Option<u64>,
    pub msd: u32,
    pub diversity: DiversityMode,
}

impl Query {
    pub fn new(src: NodeId, dst: Option<NodeId>) -> Self {
        Query {
            src,
            dst,
            delay_bound: None,
            msd: DEFAULT_MSD,
            diversity: DiversityMode::Standard,
        }
    }

    pub fn with_bound(mut self, bound: Option<u64>) -> Self {
        self.delay_bound = bound;
        self
    }

    pub fn with_msd(mut self, msd: u32) -> Self {
        self.msd = msd;
        self
    }

    pub fn with_diversity(mut self, diversity: DiversityMode) -> Self {
        self.diversity = diversity;
        self
    }

    pub(crate) fn feasible(&self, delay: u64, nsegs: u32) -> bool {
        nsegs <= self.msd && self.delay_bound.is_none_or(|b| delay <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSolution {
    pub cost: u64,
    pub delay: u64,
    pub nsegs: u32,
    pub list: SegmentList,
}

impl PathSolution {
    pub fn triple(&self) -> Triple {
        (self.cost, self.delay, self.nsegs)
    }
}

pub type Solutions = BTreeMap<NodeId, Vec<PathSolution>>;

/// The fields of a label that dominance relations compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelKey {
    pub cost: u64,
    pub delay: u64,
    pub nsegs: u32,
    pub open_src: NodeId,
    pub open: OpenKind,
}

impl Label {
    pub fn key(&self) -> LabelKey {
        LabelKey {
            cost: self.cost,
            delay: self.delay,
            nsegs: self.nsegs,
            open_src: self.open_src,
            open: self.open,
        }
    }
}

impl LabelKey {
    pub fn triple(&self) -> Triple {
        (self.cost, self.delay, self.nsegs)
    }
}

/// Pruning relation between two labels at the same node.
pub trait Dominance: Send + Sync {
    fn name(&self) -> &'static str;
    /// True if `candidate` can be discarded in favour of `incumbent`.
    fn prunes(&self, incumbent: &LabelKey, candidate: &LabelKey) -> bool;
}

/// The relation that restores isotonicity for segment counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtendedDominance;

impl Dominance for ExtendedDominance {
    fn name(&self) -> &'static str {
        "extended"
    }

    #[inline]
    fn prunes(&self, incumbent: &LabelKey, candidate: &LabelKey) -> bool {
        ext_dominates(incumbent, candidate)
    }
}

/// Extended dominance narrowed to the labels that can still catch up.
/// The default front relation of the search.
#[derive(Debug, Clone, Copy, Default)]
pub struct TightDominance;

impl Dominance for TightDominance {
    fn name(&self) -> &'static str {
        "tight"
    }

    #[inline]
    fn prunes(&self, incumbent: &LabelKey, candidate: &LabelKey) -> bool {
        tight_dominates(incumbent, candidate)
    }
}

/// Usual 3-metric Pareto dominance. Loses solutions; kept for comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlainDominance;

impl Dominance for PlainDominance {
    fn name(&self) -> &'static str {
        "plain"
    }

    fn prunes(&self, incumbent: &LabelKey, candidate: &LabelKey) -> bool {
        incumbent.cost <= candidate.cost
            && incumbent.delay <= candidate.delay
            && incumbent.nsegs <= candidate.nsegs
    }
}

/// Keeps every label except exact duplicates of the search state.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPruning;

impl Dominance for NoPruning {
    fn name(&self) -> &'static str {
        "none"
    }

    fn prunes(&self, incumbent: &LabelKey, candidate: &LabelKey) -> bool {
        incumbent == candidate
    }
}

/// Extended dominance: `candidate` is prunable iff `incumbent` is no worse
/// on cost and delay and either needs at least two segments fewer, or shares
/// the same open-segment source with no more segments.
///
/// Two labels sharing a source only evolve identically when their open
/// segments can be pushed alike, so a node segment is never pruned by a
/// link segment of the same source.
#[inline]
pub fn ext_dominates(incumbent: &LabelKey, candidate: &LabelKey) -> bool {
    if incumbent.cost > candidate.cost || incumbent.delay > candidate.delay {
        return false;
    }
    if incumbent.nsegs + 2 <= candidate.nsegs {
        return true;
    }
    let link_over_node = matches!(incumbent.open, OpenKind::Adjacency(_))
        && !matches!(candidate.open, OpenKind::Adjacency(_));
    incumbent.open_src == candidate.open_src
        && incumbent.nsegs <= candidate.nsegs
        && !link_over_node
}

/// `candidate` is prunable iff `incumbent` is no worse on all three metrics
/// and the candidate has no way to gain a segment on it:
/// - the incumbent already needs fewer segments;
/// - the candidate's open segment is a link, closed on the next hop;
/// - both share the open-segment source and the incumbent's is pushable.
///
/// Along any continuation needing `m` segments from here, a label with `k`
/// segments ends with between `k - 1 + m` and `k + m`, so a one-segment
/// lead is never lost.
#[inline]
pub fn tight_dominates(incumbent: &LabelKey, candidate: &LabelKey) -> bool {
    if incumbent.cost > candidate.cost
        || incumbent.delay > candidate.delay
        || incumbent.nsegs > candidate.nsegs
    {
        return false;
    }
    incumbent.nsegs < candidate.nsegs
        || matches!(candidate.open, OpenKind::Adjacency(_))
        || (incumbent.open_src == candidate.open_src
            && !matches!(incumbent.open, OpenKind::Adjacency(_)))
}

/// Per-node label set: compact keys side by side with arena ids.
#[derive(Debug, Clone, Default)]
pub struct ParetoFront {
    keys: Vec<LabelKey>,
    ids: Vec<LabelId>,
}

impl ParetoFront {
    /// Inserts `candidate` unless a member prunes it; on acceptance evicts
    /// every member the candidate prunes and reports them through `evicted`.
    pub fn insert<D: Dominance + ?Sized>(
        &mut self,
        key: LabelKey,
        id: LabelId,
        dom: &D,
        mut evicted: impl FnMut(LabelId),
    ) -> bool {
        if self.keys.iter().any(|m| dom.prunes(m, &key)) {
            return false;
        }
        let mut i = 0;
        while i < self.keys.len() {
            if dom.prunes(&key, &self.keys[i]) {
                evicted(self.ids[i]);
                self.keys.swap_remove(i);
                self.ids.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.keys.push(key);
        self.ids.push(id);
        true
    }

    pub fn members(&self) -> &[LabelId] {
        &self.ids
    }

    pub fn keys(&self) -> &[LabelKey] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Distinct triples of the 3-metric Pareto filter over the members.
    pub fn plain_size(&self) -> usize {
        pareto_filter(self.keys.iter().map(LabelKey::triple)).len()
    }
}

/// Standalone form of [`ParetoFront::insert`] over owned labels.
pub fn front_insert<D: Dominance + ?Sized>(
    front: &mut Vec<Label>,
    candidate: Label,
    dom: &D,
) -> bool {
    let key = candidate.key();
    if front.iter().any(|m| dom.prunes(&m.key(), &key)) {
        return false;
    }
    front.retain(|m| !dom.prunes(&key, &m.key()));
    front.push(candidate);
    true
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub labels_pushed: u64,
    /// Live labels across all fronts at termination.
    pub labels_stored: u64,
    /// Sum over nodes of the plain Pareto front size of the stored labels.
    pub plain_stored: u64,
    pub extensions: u64,
    /// Largest per-extension increase of the segment count.
    pub max_increment: u32,
}

impl SearchStats {
    pub fn front_overhead_ratio(&self) -> f64 {
        if self.plain_stored == 0 {
            1.0
        } else {
            self.labels_stored as f64 / self.plain_stored as f64
        }
    }
}

/// Full state of a finished search, for inspection.
#[derive(Debug, Clone)]
pub struct SearchRun {
    pub labels: Vec<Label>,
    pub fronts: Vec<ParetoFront>,
    /// Label ids in pop order.
    pub popped: Vec<LabelId>,
    pub stats: SearchStats,
}

impl SearchRun {
    /// Fills `stats.plain_stored`; kept out of the search proper.
    pub fn count_plain_fronts(&mut self) {
        self.stats.plain_stored = self.fronts.iter().map(|f| f.plain_size() as u64).sum();
    }
}

/// Best-first search; the queue is ordered lexicographically by
/// (cost, delay, nsegs) with insertion order breaking ties.
pub fn search<D: Dominance + ?Sized>(
    db: &SegmentDb,
    topo: &Topology,
    q: &Query,
    dom: &D,
) -> SearchRun {
    let mut run = search_uncounted(db, topo, q, dom);
    run.count_plain_fronts();
    run
}

pub(crate) fn search_uncounted<D: Dominance + ?Sized>(
    db: &SegmentDb,
    topo: &Topology,
    q: &Query,
    dom: &D,
) -> SearchRun {
    let n = topo.node_count();
    let source = Label::source(q.src);
    let mut fronts = vec![ParetoFront::default(); n];
    fronts[q.src].keys.push(source.key());
    fronts[q.src].ids.push(0);
    let mut labels = vec![source];
    let mut evicted = vec![false];
    let mut popped = Vec::new();
    let mut stats = SearchStats::default();

    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0u64, 0u32, 0usize)));
    stats.labels_pushed = 1;

    while let Some(Reverse((_, _, _, id))) = heap.pop() {
        if evicted[id] {
            continue;
        }
        popped.push(id);
        let cur = labels[id].clone();
        for &ei in topo.out_edges(cur.at) {
            let next = extend_label(db, topo, &cur, id, ei);
            stats.extensions += 1;
            stats.max_increment = stats.max_increment.max(next.nsegs - cur.nsegs);
            if !q.feasible(next.delay, next.nsegs) {
                continue;
            }
            let key = next.key();
            let nid = labels.len();
            let accepted = fronts[next.at].insert(key, nid, dom, |m| evicted[m] = true);
            if accepted {
                labels.push(next);
                evicted.push(false);
                heap.push(Reverse((key.cost, key.delay, key.nsegs, nid)));
                stats.labels_pushed += 1;
            }
        }
    }

    stats.labels_stored = fronts.iter().map(|f| f.len() as u64).sum();
    SearchRun {
        labels,
        fronts,
        popped,
        stats,
    }
}

/// Pareto-optimal solutions at each requested destination.
pub fn collect_solutions(run: &SearchRun, topo: &Topology, q: &Query) -> Solutions {
    let targets: Vec<NodeId> = match q.dst {
        Some(d) => vec![d],
        None => (0..topo.node_count()).collect(),
    };
    let mut out = Solutions::new();
    for t in targets {
        let members = run.fronts[t].members();
        let best = pareto_filter(run.fronts[t].keys().iter().map(LabelKey::triple));
        let mut sols: Vec<(String, PathSolution)> = Vec::new();
        for &m in members {
            let l = &run.labels[m];
            if !best.contains(&l.triple()) {
                continue;
            }
            let list = finalize_list(&run.labels, m);
            let key = list.display(topo).to_string();
            sols.push((
                key,
                PathSolution {
                    cost: l.cost,
                    delay: l.delay,
                    nsegs: l.nsegs,
                    list,
                },
            ));
        }
        sols.sort_by(|a, b| a.1.triple().cmp(&b.1.triple()).then_with(|| a.0.cmp(&b.0)));
        match q.diversity {
            DiversityMode::Standard => sols.dedup_by(|a, b| a.1.triple() == b.1.triple()),
            DiversityMode::MaxDiversity => sols.dedup_by(|a, b| a.0 == b.0),
        }
        if !sols.is_empty() {
            out.insert(t, sols.into_iter().map(|(_, s)| s).collect());
        }
    }
    out
}

/// Deployable Pareto-optimal segment lists. Standard mode prunes with
/// [`TightDominance`]; max-diversity mode keeps every label EXT-DOM keeps,
/// which can surface more distinct lists per triple.
pub fn solve(db: &SegmentDb, topo: &Topology, q: &Query) -> Solutions {
    match q.diversity {
        DiversityMode::Standard => solve_with(db, topo, q, &TightDominance),
        DiversityMode::MaxDiversity => solve_with(db, topo, q, &ExtendedDominance),
    }
}

pub fn solve_with<D: Dominance + ?Sized>(
    db: &SegmentDb,
    topo: &Topology,
    q: &Query,
    dom: &D,
) -> Solutions {
    collect_solutions(&search(db, topo, q, dom), topo, q)
}

/// Delay-constrained least-cost pick among `solve` results: minimum cost,
/// then delay, then segment count, then list rendering.
pub fn dclc(db: &SegmentDb, topo: &Topology, q: &Query) -> Option<PathSolution> {
    let dst = q.dst?;
    let q = Query {
        diversity: DiversityMode::Standard,
        ..q.clone()
    };
    solve(db, topo, &q).remove(&dst).and_then(pick_dclc(topo))
}

pub(crate) fn pick_dclc(
    topo: &Topology,
) -> impl Fn(Vec<PathSolution>) -> Option<PathSolution> + '_ {
    move |sols| {
        sols.into_iter().min_by(|a, b| {
            a.triple().cmp(&b.triple()).then_with(|| {
                a.list
                    .display(topo)
                    .to_string()
                    .cmp(&b.list.display(topo).to_string())
            })
        })
    }
}
