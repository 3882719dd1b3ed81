//! All-pairs segment database.
//!
//! For every ordered pair the table stores the IGP distance and the worst
//! delay over all minimum-cost paths, since ECMP hashing may pick any of
//! them. Unreachable pairs hold [`INF`]; all arithmetic on table values
//! saturates.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::topo::{Edge, NodeId, Topology};

/// Sentinel for unreachable pairs.
pub const INF: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairEntry {
    pub igp_dist: u64,
    pub worst_delay: u64,
}

impl PairEntry {
    pub const UNREACHABLE: PairEntry = PairEntry {
        igp_dist: INF,
        worst_delay: INF,
    };

    pub fn reachable(&self) -> bool {
        self.igp_dist != INF
    }
}

#[derive(Debug, Clone)]
pub struct SegmentDb {
    n: usize,
    entries: Vec<PairEntry>,
}

impl SegmentDb {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn lookup(&self, u: NodeId, v: NodeId) -> PairEntry {
        self.entries[u * self.n + v]
    }

    #[inline]
    pub fn dist(&self, u: NodeId, v: NodeId) -> u64 {
        self.lookup(u, v).igp_dist
    }

    #[inline]
    pub fn worst_delay(&self, u: NodeId, v: NodeId) -> u64 {
        self.lookup(u, v).worst_delay
    }

    /// True iff `e` lies on the shortest-path DAG rooted at `s`, i.e. a
    /// minimum-cost path from `s` to `e.src` followed by `e` is still a
    /// minimum-cost path.
    #[inline]
    pub fn is_shortest_extension(&self, s: NodeId, e: &Edge) -> bool {
        let to_u = self.dist(s, e.src);
        to_u != INF && to_u + e.cost as u64 == self.dist(s, e.dst)
    }

    /// CSV dump `src,dst,igp_dist,worst_delay`; unreachable pairs print `inf`.
    pub fn to_csv(&self, topo: &Topology) -> String {
        let mut out = String::from("src,dst,igp_dist,worst_delay\n");
        let fmt = |v: u64| {
            if v == INF {
                "inf".to_string()
            } else {
                v.to_string()
            }
        };
        for u in 0..self.n {
            for v in 0..self.n {
                let e = self.lookup(u, v);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    topo.name(u),
                    topo.name(v),
                    fmt(e.igp_dist),
                    fmt(e.worst_delay)
                );
            }
        }
        out
    }
}

/// One Dijkstra on cost per source, then a longest-delay pass over the
/// resulting shortest-path DAG in distance order. Sources run in parallel.
pub fn build_segment_db(topo: &Topology) -> SegmentDb {
    let n = topo.node_count();
    let rows: Vec<Vec<PairEntry>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(topo, s))
        .collect();
    SegmentDb {
        n,
        entries: rows.into_iter().flatten().collect(),
    }
}

fn single_source(topo: &Topology, s: NodeId) -> Vec<PairEntry> {
    let n = topo.node_count();
    let mut dist = vec![INF; n];
    let mut settled = Vec::with_capacity(n);
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0;
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        settled.push(u);
        for &ei in topo.out_edges(u) {
            let e = topo.edge(ei);
            let nd = d + e.cost as u64;
            if nd < dist[e.dst] {
                dist[e.dst] = nd;
                heap.push(Reverse((nd, e.dst)));
            }
        }
    }

    // Costs are >= 1, so settle order is a topological order of the DAG.
    let mut worst = vec![INF; n];
    worst[s] = 0;
    for &u in &settled {
        for &ei in topo.out_edges(u) {
            let e = topo.edge(ei);
            if dist[u] + e.cost as u64 == dist[e.dst] {
                let cand = worst[u] + e.delay as u64;
                if worst[e.dst] == INF || cand > worst[e.dst] {
                    worst[e.dst] = cand;
                }
            }
        }
    }
    dist.into_iter()
        .zip(worst)
        .map(|(igp_dist, worst_delay)| PairEntry {
            igp_dist,
            worst_delay,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo::{generate_random, parse_topology, RandomSpec};

    fn g1() -> Topology {
        parse_topology("directed\nS A 1 1\nS B 1 3\nA D 1 1\nB D 1 1\n").unwrap()
    }

    /// Simple-path enumeration: min cost, then max delay among min-cost paths.
    fn brute_pair(topo: &Topology, s: NodeId, t: NodeId) -> PairEntry {
        fn dfs(
            topo: &Topology,
            u: NodeId,
            t: NodeId,
            seen: &mut Vec<bool>,
            acc: (u64, u64),
            best: &mut Option<(u64, u64)>,
        ) {
            if u == t {
                *best = match *best {
                    None => Some(acc),
                    Some((c, d)) if acc.0 < c || (acc.0 == c && acc.1 > d) => Some(acc),
                    b => b,
                };
                return;
            }
            for &ei in topo.out_edges(u) {
                let e = topo.edge(ei);
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    dfs(
                        topo,
                        e.dst,
                        t,
                        seen,
                        (acc.0 + e.cost as u64, acc.1 + e.delay as u64),
                        best,
                    );
                    seen[e.dst] = false;
                }
            }
        }
        let mut seen = vec![false; topo.node_count()];
        seen[s] = true;
        let mut best = None;
        dfs(topo, s, t, &mut seen, (0, 0), &mut best);
        best.map_or(PairEntry::UNREACHABLE, |(c, d)| PairEntry {
            igp_dist: c,
            worst_delay: d,
        })
    }

    #[test]
    fn g1_entries() {
        let t = g1();
        let db = build_segment_db(&t);
        let [s, a, _b, d] = [0, 1, 2, 3];
        assert_eq!(
            db.lookup(s, d),
            PairEntry {
                igp_dist: 2,
                worst_delay: 4
            }
        );
        assert_eq!(
            db.lookup(a, d),
            PairEntry {
                igp_dist: 1,
                worst_delay: 1
            }
        );
        assert_eq!(db.lookup(d, s), PairEntry::UNREACHABLE);
        for v in 0..4 {
            assert_eq!(
                db.lookup(v, v),
                PairEntry {
                    igp_dist: 0,
                    worst_delay: 0
                }
            );
        }
    }

    #[test]
    fn shortest_extension_checks() {
        let t = g1();
        let db = build_segment_db(&t);
        let ad = t.find_edge(1, 3, 0).unwrap();
        assert!(db.is_shortest_extension(0, t.edge(ad)));

        let g2 = parse_topology(
            "directed\nS A 1 1\nA C 1 1\nS B 1 2\nB C 1 1\nS F 1 9\nF C 1 9\nC D 1 1\nA G 1 9\nG D 1 9\n",
        )
        .unwrap();
        let db2 = build_segment_db(&g2);
        let s = g2.node_id("S").unwrap();
        let b = g2.node_id("B").unwrap();
        let c = g2.node_id("C").unwrap();
        let bc = g2.find_edge(b, c, 0).unwrap();
        assert_eq!(db2.dist(s, b) + 1, 2);
        assert!(db2.is_shortest_extension(s, g2.edge(bc)));
        // B -> C seen from B's predecessor on a longer detour is not shortest
        let tri = parse_topology("directed\nS B 1 1\nB C 2 1\nS C 2 1\n").unwrap();
        let dbt = build_segment_db(&tri);
        assert!(!dbt.is_shortest_extension(0, tri.edge(tri.find_edge(1, 2, 0).unwrap())));
        // one hop from the source along a shortest edge
        assert!(dbt.is_shortest_extension(1, tri.edge(tri.find_edge(1, 2, 0).unwrap())));
    }

    #[test]
    fn uniform_weights_give_hop_distance() {
        let mut spec = RandomSpec::new(10, 2.0, 3);
        spec.cost_range = (3, 3);
        spec.delay_range = (2, 2);
        let t = generate_random(&spec).unwrap();
        let db = build_segment_db(&t);
        for s in 0..10 {
            // BFS hop counts
            let mut hops = [u64::MAX; 10];
            hops[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &ei in t.out_edges(u) {
                    let v = t.edge(ei).dst;
                    if hops[v] == u64::MAX {
                        hops[v] = hops[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            for (v, &h) in hops.iter().enumerate() {
                assert_eq!(db.dist(s, v), 3 * h);
                assert_eq!(db.worst_delay(s, v), 2 * h);
            }
        }
    }

    #[test]
    fn csv_dump_marks_unreachable() {
        let t = g1();
        let csv = build_segment_db(&t).to_csv(&t);
        assert!(csv.starts_with("src,dst,igp_dist,worst_delay\nS,S,0,0\n"));
        assert!(csv.contains("S,D,2,4\n"));
        assert!(csv.contains("D,S,inf,inf\n"));
    }

    proptest::proptest! {
        #[test]
        fn matches_path_enumeration(n in 2usize..=8, seed: u64, deg in 1.0f64..3.0) {
            proptest::prop_assume!(deg < n as f64);
            let t = generate_random(&RandomSpec::new(n, deg, seed)).unwrap();
            let db = build_segment_db(&t);
            for s in 0..n {
                for v in 0..n {
                    proptest::prop_assert_eq!(db.lookup(s, v), brute_pair(&t, s, v));
                    // Bellman and worst-delay recurrences
                    if v != s {
                        let ins: Vec<_> = t.edges().iter().filter(|e| e.dst == v).collect();
                        let best = ins.iter().map(|e| db.dist(s, e.src).saturating_add(e.cost as u64)).min().unwrap();
                        proptest::prop_assert_eq!(db.dist(s, v), best);
                        let worst = ins.iter()
                            .filter(|e| db.is_shortest_extension(s, e))
                            .map(|e| db.worst_delay(s, e.src) + e.delay as u64)
                            .max().unwrap();
                        proptest::prop_assert_eq!(db.worst_delay(s, v), worst);
                    }
                }
            }
        }
    }
}
