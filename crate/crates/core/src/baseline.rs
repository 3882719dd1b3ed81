//! Clique-transform baseline.
//!
//! Every arc of the transformed graph is one segment, so the segment count
//! becomes an ordinary additive (and isotone) metric and a plain
//! multi-criteria label-setting search is exact on it. The price is density:
//! one node-segment arc per connected ordered pair.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::encoder::{Segment, SegmentList};
use crate::pareto::{dominates_or_equal, pareto_filter, Triple};
use crate::pathfinder::{DiversityMode, PathSolution, Query, SearchStats, Solutions};
use crate::segdb::SegmentDb;
use crate::topo::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SrArc {
    pub to: NodeId,
    pub cost: u64,
    pub delay: u64,
    pub segment: Segment,
}

#[derive(Debug, Clone)]
pub struct SrGraph {
    arcs: Vec<Vec<SrArc>>,
}

impl SrGraph {
    pub fn arcs(&self, u: NodeId) -> &[SrArc] {
        &self.arcs[u]
    }

    pub fn node_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_arc_count(&self) -> usize {
        self.arcs
            .iter()
            .flatten()
            .filter(|a| matches!(a.segment, Segment::Node(_)))
            .count()
    }

    pub fn adjacency_arc_count(&self) -> usize {
        self.arcs
            .iter()
            .flatten()
            .filter(|a| matches!(a.segment, Segment::Adjacency(_)))
            .count()
    }
}

/// Node-segment arcs for every connected ordered pair, plus adjacency arcs
/// not componentwise dominated by their pair's node-segment arc.
pub fn build_sr_graph(db: &SegmentDb, topo: &Topology) -> SrGraph {
    let n = topo.node_count();
    let mut arcs = vec![Vec::new(); n];
    for (u, out) in arcs.iter_mut().enumerate() {
        for v in 0..n {
            let entry = db.lookup(u, v);
            if v != u && entry.reachable() {
                out.push(SrArc {
                    to: v,
                    cost: entry.igp_dist,
                    delay: entry.worst_delay,
                    segment: Segment::Node(v),
                });
            }
        }
        for &ei in topo.out_edges(u) {
            let e = topo.edge(ei);
            let node = db.lookup(u, e.dst);
            if node.igp_dist <= e.cost as u64 && node.worst_delay <= e.delay as u64 {
                continue;
            }
            out.push(SrArc {
                to: e.dst,
                cost: e.cost as u64,
                delay: e.delay as u64,
                segment: Segment::Adjacency(ei),
            });
        }
    }
    SrGraph { arcs }
}

#[derive(Debug, Clone, Copy)]
struct CliqueLabel {
    at: NodeId,
    cost: u64,
    delay: u64,
    nsegs: u32,
    pred: Option<(usize, Segment)>,
}

impl CliqueLabel {
    fn triple(&self) -> Triple {
        (self.cost, self.delay, self.nsegs)
    }
}

/// Plain 3-metric label-setting search on the SR graph. Returns the
/// solutions and search counters (plain fronts, so the overhead ratio is 1).
pub fn solve_clique_with_stats(
    g: &SrGraph,
    topo: &Topology,
    q: &Query,
) -> (Solutions, SearchStats) {
    let n = g.node_count();
    let mut labels = vec![CliqueLabel {
        at: q.src,
        cost: 0,
        delay: 0,
        nsegs: 0,
        pred: None,
    }];
    let mut alive = vec![true];
    let mut fronts: Vec<Vec<usize>> = vec![Vec::new(); n];
    fronts[q.src].push(0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0u64, 0u32, 0usize)));
    let mut stats = SearchStats {
        labels_pushed: 1,
        ..SearchStats::default()
    };

    while let Some(Reverse((_, _, _, id))) = heap.pop() {
        if !alive[id] {
            continue;
        }
        let cur = labels[id];
        if cur.nsegs >= q.msd {
            continue;
        }
        for arc in g.arcs(cur.at) {
            stats.extensions += 1;
            let next = CliqueLabel {
                at: arc.to,
                cost: cur.cost + arc.cost,
                delay: cur.delay + arc.delay,
                nsegs: cur.nsegs + 1,
                pred: Some((id, arc.segment)),
            };
            if !q.feasible(next.delay, next.nsegs) {
                continue;
            }
            let t = next.triple();
            let front = &mut fronts[arc.to];
            if front
                .iter()
                .any(|&m| dominates_or_equal(&labels[m].triple(), &t))
            {
                continue;
            }
            front.retain(|&m| {
                let keep = !dominates_or_equal(&t, &labels[m].triple());
                if !keep {
                    alive[m] = false;
                }
                keep
            });
            let nid = labels.len();
            front.push(nid);
            labels.push(next);
            alive.push(true);
            heap.push(Reverse((t.0, t.1, t.2, nid)));
            stats.labels_pushed += 1;
        }
    }
    stats.max_increment = 1;
    stats.labels_stored = fronts.iter().map(|f| f.len() as u64).sum();
    stats.plain_stored = stats.labels_stored;

    let targets: Vec<NodeId> = match q.dst {
        Some(d) => vec![d],
        None => (0..n).collect(),
    };
    let mut out = Solutions::new();
    for t in targets {
        let best = pareto_filter(fronts[t].iter().map(|&m| labels[m].triple()));
        let mut sols: Vec<(String, PathSolution)> = fronts[t]
            .iter()
            .filter(|&&m| best.contains(&labels[m].triple()))
            .map(|&m| {
                let list = unwind(&labels, m);
                let l = &labels[m];
                (
                    list.display(topo).to_string(),
                    PathSolution {
                        cost: l.cost,
                        delay: l.delay,
                        nsegs: l.nsegs,
                        list,
                    },
                )
            })
            .collect();
        sols.sort_by(|a, b| a.1.triple().cmp(&b.1.triple()).then_with(|| a.0.cmp(&b.0)));
        match q.diversity {
            DiversityMode::Standard => sols.dedup_by(|a, b| a.1.triple() == b.1.triple()),
            DiversityMode::MaxDiversity => sols.dedup_by(|a, b| a.0 == b.0),
        }
        if !sols.is_empty() {
            out.insert(t, sols.into_iter().map(|(_, s)| s).collect());
        }
    }
    (out, stats)
}

pub fn solve_clique(g: &SrGraph, topo: &Topology, q: &Query) -> Solutions {
    solve_clique_with_stats(g, topo, q).0
}

fn unwind(labels: &[CliqueLabel], mut id: usize) -> SegmentList {
    let mut segs = Vec::new();
    while let Some((p, seg)) = labels[id].pred {
        segs.push(seg);
        id = p;
    }
    segs.reverse();
    SegmentList { segments: segs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segdb::build_segment_db;
    use crate::topo::parse_topology;

    fn setup(text: &str) -> (Topology, SegmentDb, SrGraph) {
        let t = parse_topology(text).unwrap();
        let db = build_segment_db(&t);
        let g = build_sr_graph(&db, &t);
        (t, db, g)
    }

    fn arc(g: &SrGraph, t: &Topology, u: &str, v: &str, node: bool) -> Option<(u64, u64)> {
        let (u, v) = (t.node_id(u).unwrap(), t.node_id(v).unwrap());
        g.arcs(u)
            .iter()
            .find(|a| a.to == v && matches!(a.segment, Segment::Node(_)) == node)
            .map(|a| (a.cost, a.delay))
    }

    #[test]
    fn g1_node_arcs() {
        let (t, _, g) = setup("directed\nS A 1 1\nS B 1 3\nA D 1 1\nB D 1 1\n");
        assert_eq!(arc(&g, &t, "S", "D", true), Some((2, 4)));
        assert_eq!(arc(&g, &t, "S", "A", true), Some((1, 1)));
        assert_eq!(arc(&g, &t, "A", "D", true), Some((1, 1)));
        assert_eq!(arc(&g, &t, "B", "D", true), Some((1, 1)));
        assert_eq!(arc(&g, &t, "S", "B", true), Some((1, 3)));
        assert_eq!(arc(&g, &t, "D", "S", true), None);
        // connected ordered pairs: S->{A,B,D}, A->D, B->D
        assert_eq!(g.node_arc_count(), 5);
        assert_eq!(g.adjacency_arc_count(), 0);
    }

    #[test]
    fn t1_keeps_undominated_adjacency() {
        let (t, _, g) = setup("directed\nX Y 5 1\nX Z 1 10\nZ Y 1 10\n");
        assert_eq!(arc(&g, &t, "X", "Y", true), Some((2, 20)));
        assert_eq!(arc(&g, &t, "X", "Y", false), Some((5, 1)));
        assert!(g.adjacency_arc_count() <= t.edges().len());
    }

    #[test]
    fn single_edge_adjacency_is_dropped() {
        let (t, _, g) = setup("directed\nA B 3 4\n");
        assert_eq!(arc(&g, &t, "A", "B", true), Some((3, 4)));
        assert_eq!(arc(&g, &t, "A", "B", false), None);
    }

    #[test]
    fn g1_and_g2_fronts() {
        let (t, _, g) = setup("directed\nS A 1 1\nS B 1 3\nA D 1 1\nB D 1 1\n");
        let sols = solve_clique(&g, &t, &Query::new(0, Some(3)));
        let got: Vec<_> = sols[&3].iter().map(|s| s.triple()).collect();
        assert_eq!(got, [(2, 2, 2), (2, 4, 1)]);

        let (t2, _, g2) = setup(
            "directed\nS A 1 1\nA C 1 1\nS B 1 2\nB C 1 1\nS F 1 9\nF C 1 9\nC D 1 1\nA G 1 9\nG D 1 9\n",
        );
        let d = t2.node_id("D").unwrap();
        let q = Query::new(0, Some(d)).with_bound(Some(4)).with_msd(2);
        let sols = solve_clique(&g2, &t2, &q);
        assert_eq!(sols[&d].len(), 1);
        assert_eq!(sols[&d][0].triple(), (3, 4, 2));
        assert_eq!(sols[&d][0].list.display(&t2).to_string(), "node:B,node:D");
    }

    #[test]
    fn source_query() {
        let (t, _, g) = setup("directed\nS A 1 1\n");
        let sols = solve_clique(&g, &t, &Query::new(0, Some(0)));
        assert_eq!(sols[&0].len(), 1);
        assert_eq!(sols[&0][0].triple(), (0, 0, 0));
    }
}
