//! Brute-force ground truth.
//!
//! Enumerates every chaining segment list of length at most `msd` (all node
//! segments over connected pairs, all adjacency segments), scores each with
//! [`guaranteed_distance`] and Pareto-filters the results. Exponential in
//! `msd`; meant for graphs of a handful of nodes.

use std::collections::{BTreeMap, HashMap};

use crate::encoder::{guaranteed_distance, Segment, SegmentList};
use crate::pareto::{pareto_filter, Triple};
use crate::pathfinder::{PathSolution, Solutions};
use crate::segdb::SegmentDb;
use crate::topo::{NodeId, Topology};

struct Enumerator<'a> {
    db: &'a SegmentDb,
    topo: &'a Topology,
    src: NodeId,
    msd: u32,
    delay_bound: Option<u64>,
    /// First witness list seen per (endpoint, triple).
    seen: Vec<HashMap<Triple, SegmentList>>,
    stack: Vec<Segment>,
}

impl Enumerator<'_> {
    fn record(&mut self, at: NodeId) {
        let list = SegmentList {
            segments: self.stack.clone(),
        };
        let (cost, delay) = guaranteed_distance(self.db, self.topo, &list, self.src)
            .expect("enumerated lists chain by construction");
        if self.delay_bound.is_some_and(|b| delay > b) {
            return;
        }
        self.seen[at]
            .entry((cost, delay, list.len() as u32))
            .or_insert(list);
    }

    fn walk(&mut self, at: NodeId) {
        self.record(at);
        if self.stack.len() as u32 == self.msd {
            return;
        }
        for t in 0..self.topo.node_count() {
            if t != at && self.db.lookup(at, t).reachable() {
                self.stack.push(Segment::Node(t));
                self.walk(t);
                self.stack.pop();
            }
        }
        for &ei in self.topo.out_edges(at) {
            self.stack.push(Segment::Adjacency(ei));
            self.walk(self.topo.edge(ei).dst);
            self.stack.pop();
        }
    }
}

/// Pareto sets for every destination reachable from `src`.
pub fn enumerate_all(
    db: &SegmentDb,
    topo: &Topology,
    src: NodeId,
    msd: u32,
    delay_bound: Option<u64>,
) -> Solutions {
    let mut en = Enumerator {
        db,
        topo,
        src,
        msd,
        delay_bound,
        seen: vec![HashMap::new(); topo.node_count()],
        stack: Vec::new(),
    };
    en.walk(src);

    let mut out = BTreeMap::new();
    for (dst, mut seen) in en.seen.into_iter().enumerate() {
        let front = pareto_filter(seen.keys().copied());
        if front.is_empty() {
            continue;
        }
        let sols = front
            .into_iter()
            .map(|t| PathSolution {
                cost: t.0,
                delay: t.1,
                nsegs: t.2,
                list: seen.remove(&t).unwrap(),
            })
            .collect();
        out.insert(dst, sols);
    }
    out
}

pub fn enumerate_fronts(
    db: &SegmentDb,
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    msd: u32,
    delay_bound: Option<u64>,
) -> Vec<PathSolution> {
    enumerate_all(db, topo, src, msd, delay_bound)
        .remove(&dst)
        .unwrap_or_default()
}
