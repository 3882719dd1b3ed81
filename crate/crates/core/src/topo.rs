//! Topology model, text ingestion and seeded random instances.
//!
//! File format (UTF-8):
//!
//! ```text
//! # comment
//! directed            # or `undirected` (the default)
//! S A 1 1             # <src> <dst> <cost> <delay-us>
//! ```
//!
//! Undirected inputs expand each link into two directed edges carrying the
//! same weights. Parallel links are kept and numbered per ordered pair.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Dense node index in `[0, node_count)`.
pub type NodeId = usize;

/// Index of an edge in [`Topology::edges`].
pub type EdgeIdx = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// IGP metric, at least 1.
    pub cost: u32,
    /// Link delay in microseconds.
    pub delay: u32,
    /// Ordinal among the parallel edges of `(src, dst)`.
    pub edge_id: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopoError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: self-loop on node `{node}`")]
    SelfLoop { line: usize, node: String },
    #[error("line {line}: invalid {field} `{value}` (expected an integer in {min}..=4294967295)")]
    Weight {
        line: usize,
        field: &'static str,
        value: String,
        min: u32,
    },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}

/// Directed multigraph with per-edge (cost, delay). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeIdx>>,
    directed: bool,
}

impl Topology {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: EdgeIdx) -> &Edge {
        &self.edges[idx]
    }

    /// Whether the source text declared the graph as directed.
    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.names[node]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    /// Outgoing edge indices of `node`, in insertion order.
    pub fn out_edges(&self, node: NodeId) -> &[EdgeIdx] {
        &self.out[node]
    }

    /// Builds a topology from explicit parts. Used by the parser, the
    /// generator and tests; names must be unique and free of whitespace.
    pub fn from_edges<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        links: impl IntoIterator<Item = (NodeId, NodeId, u32, u32)>,
        directed: bool,
    ) -> Self {
        let mut topo = Topology {
            names: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            out: Vec::new(),
            directed,
        };
        for name in names {
            topo.intern(&name.into());
        }
        for (src, dst, cost, delay) in links {
            assert!(src != dst, "self-loop");
            assert!(cost >= 1, "zero cost");
            topo.push_edge(src, dst, cost, delay);
            if !directed {
                topo.push_edge(dst, src, cost, delay);
            }
        }
        topo
    }

    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.out.push(Vec::new());
        id
    }

    fn push_edge(&mut self, src: NodeId, dst: NodeId, cost: u32, delay: u32) {
        let edge_id = self.out[src]
            .iter()
            .filter(|&&e| self.edges[e].dst == dst)
            .count() as u32;
        self.out[src].push(self.edges.len());
        self.edges.push(Edge {
            src,
            dst,
            cost,
            delay,
            edge_id,
        });
    }

    /// Serializes every directed edge under a `directed` header.
    pub fn serialize(&self) -> String {
        let mut out = String::from("directed\n");
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                self.names[e.src], self.names[e.dst], e.cost, e.delay
            );
        }
        out
    }

    /// Finds the edge `src -> dst` with the given parallel ordinal.
    pub fn find_edge(&self, src: NodeId, dst: NodeId, edge_id: u32) -> Option<EdgeIdx> {
        self.out[src]
            .iter()
            .copied()
            .find(|&e| self.edges[e].dst == dst && self.edges[e].edge_id == edge_id)
    }
}

fn parse_weight(line: usize, field: &'static str, tok: &str, min: u32) -> Result<u32, TopoError> {
    match tok.parse::<u32>() {
        Ok(v) if v >= min => Ok(v),
        _ => Err(TopoError::Weight {
            line,
            field,
            value: tok.to_string(),
            min,
        }),
    }
}

/// Parses the topology text format described in the module docs.
pub fn parse_topology(text: &str) -> Result<Topology, TopoError> {
    let mut directed = None;
    let mut links: Vec<(String, String, u32, u32)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [word] => {
                let flag = match *word {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(TopoError::UnknownDirective {
                            line,
                            directive: other.to_string(),
                        })
                    }
                };
                if directed.is_some() || !links.is_empty() {
                    return Err(TopoError::Syntax {
                        line,
                        msg: format!("`{word}` must be the first non-comment line"),
                    });
                }
                directed = Some(flag);
            }
            [src, dst, cost, delay] => {
                if src == dst {
                    return Err(TopoError::SelfLoop {
                        line,
                        node: src.to_string(),
                    });
                }
                let cost = parse_weight(line, "cost", cost, 1)?;
                let delay = parse_weight(line, "delay", delay, 0)?;
                links.push((src.to_string(), dst.to_string(), cost, delay));
            }
            _ => {
                return Err(TopoError::Syntax {
                    line,
                    msg: format!(
                        "expected `<src> <dst> <cost> <delay>`, got {} fields",
                        toks.len()
                    ),
                })
            }
        }
    }

    let directed = directed.unwrap_or(false);
    let mut topo = Topology::from_edges(Vec::<String>::new(), [], directed);
    for (src, dst, cost, delay) in links {
        let s = topo.intern(&src);
        let d = topo.intern(&dst);
        topo.push_edge(s, d, cost, delay);
        if !directed {
            topo.push_edge(d, s, cost, delay);
        }
    }
    Ok(topo)
}

/// Parameters of [`generate_random`]. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    /// Average out-degree; the graph gets `round(n * avg_degree)` directed edges.
    pub avg_degree: f64,
    pub cost_range: (u32, u32),
    pub delay_range: (u32, u32),
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(n: usize, avg_degree: f64, seed: u64) -> Self {
        RandomSpec {
            n,
            avg_degree,
            cost_range: (1, 5),
            delay_range: (1, 10),
            seed,
        }
    }
}

/// Seeded strongly connected digraph without parallel edges.
///
/// A random Hamiltonian cycle guarantees strong connectivity; the remaining
/// edges are drawn uniformly among the unused ordered pairs.
pub fn generate_random(spec: &RandomSpec) -> Result<Topology, TopoError> {
    let n = spec.n;
    if n < 2 {
        return Err(TopoError::Infeasible(format!(
            "need at least 2 nodes, got {n}"
        )));
    }
    if spec.avg_degree.is_nan() || spec.avg_degree < 1.0 {
        return Err(TopoError::Infeasible(format!(
            "average degree {} below 1",
            spec.avg_degree
        )));
    }
    if spec.avg_degree >= n as f64 {
        return Err(TopoError::Infeasible(format!(
            "average degree {} must be below the node count {n}",
            spec.avg_degree
        )));
    }
    let (cmin, cmax) = spec.cost_range;
    let (dmin, dmax) = spec.delay_range;
    if cmin < 1 || cmin > cmax || dmin > dmax {
        return Err(TopoError::Infeasible(format!(
            "bad weight ranges cost {cmin}..={cmax}, delay {dmin}..={dmax}"
        )));
    }
    let target = ((n as f64 * spec.avg_degree).round() as usize).clamp(n, n * (n - 1));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut pairs: Vec<(NodeId, NodeId)> = Vec::with_capacity(target);
    let mut used = BTreeSet::new();
    for i in 0..n {
        let p = (order[i], order[(i + 1) % n]);
        used.insert(p);
        pairs.push(p);
    }
    let mut rest: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && !used.contains(&(u, v)))
        .collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(target - n));

    let links: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, rng.gen_range(cmin..=cmax), rng.gen_range(dmin..=dmax)))
        .collect();
    Ok(Topology::from_edges(
        (0..n).map(|i| format!("n{i}")),
        links,
        true,
    ))
}

/// Whether every node reaches every other node.
pub fn is_strongly_connected(topo: &Topology) -> bool {
    let n = topo.node_count();
    if n == 0 {
        return true;
    }
    let reach = |reverse: bool| {
        let mut adj = vec![Vec::new(); n];
        for e in topo.edges() {
            if reverse {
                adj[e.dst].push(e.src);
            } else {
                adj[e.src].push(e.dst);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(false) && reach(true)
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const G1: &str = "directed\nS A 1 1\nS B 1 3\nA D 1 1\nB D 1 1\n";

    fn edge_multiset(t: &Topology) -> Vec<(String, String, u32, u32)> {
        let mut v: Vec<_> = t
            .edges()
            .iter()
            .map(|e| {
                (
                    t.name(e.src).to_string(),
                    t.name(e.dst).to_string(),
                    e.cost,
                    e.delay,
                )
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn smallest_undirected_input() {
        let t = parse_topology("S D 1 1").unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.edges().len(), 2);
        assert!(!t.directed());
    }

    #[test]
    fn parses_g1() {
        let t = parse_topology(G1).unwrap();
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.edges().len(), 4);
        assert_eq!(t.nodes(), ["S", "A", "B", "D"]);
        let back = parse_topology(&t.serialize()).unwrap();
        assert_eq!(edge_multiset(&t), edge_multiset(&back));
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            parse_topology("S S 1 1"),
            Err(TopoError::SelfLoop {
                line: 1,
                node: "S".into()
            })
        );
    }

    #[test]
    fn rejects_bad_weights_and_directives() {
        assert!(matches!(
            parse_topology("# x\nA B -1 2"),
            Err(TopoError::Weight {
                line: 2,
                field: "cost",
                ..
            })
        ));
        assert!(matches!(
            parse_topology("A B 1 4294967296"),
            Err(TopoError::Weight { field: "delay", .. })
        ));
        assert!(matches!(
            parse_topology("A B 0 1"),
            Err(TopoError::Weight { field: "cost", .. })
        ));
        assert!(matches!(
            parse_topology("bidirectional\nA B 1 1"),
            Err(TopoError::UnknownDirective { line: 1, .. })
        ));
        assert!(matches!(
            parse_topology("A B 1\n"),
            Err(TopoError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_topology("A B 1 1\ndirected"),
            Err(TopoError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn parallel_edges_get_ordinals() {
        let t = parse_topology("directed\nA B 1 1\nA B 2 1\nB A 1 1").unwrap();
        let ids: Vec<u32> = t.edges().iter().map(|e| e.edge_id).collect();
        assert_eq!(ids, [0, 1, 0]);
        assert_eq!(t.find_edge(0, 1, 1), Some(1));
    }

    #[test]
    fn generator_is_deterministic() {
        let mut spec = RandomSpec::new(4, 3.0, 7);
        spec.cost_range = (1, 1);
        spec.delay_range = (1, 1);
        let a = generate_random(&spec).unwrap();
        let b = generate_random(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(is_strongly_connected(&a));
        assert_eq!(a.edges().len(), 12);
    }

    #[test]
    fn generator_rejects_infeasible() {
        assert!(matches!(
            generate_random(&RandomSpec::new(2, 3.0, 1)),
            Err(TopoError::Infeasible(_))
        ));
        assert!(generate_random(&RandomSpec::new(1, 1.0, 1)).is_err());
        assert!(generate_random(&RandomSpec::new(5, 0.5, 1)).is_err());
    }

    #[test]
    fn oracle_suite_instance() {
        let mut spec = RandomSpec::new(8, 2.5, 42);
        spec.cost_range = (1, 5);
        spec.delay_range = (1, 10);
        let t = generate_random(&spec).unwrap();
        assert_eq!(t.edges().len(), 20);
        assert!(is_strongly_connected(&t));
        assert!(t
            .edges()
            .iter()
            .all(|e| (1..=5).contains(&e.cost) && (1..=10).contains(&e.delay)));
    }

    proptest::proptest! {
        #[test]
        fn generated_graphs_are_strongly_connected(n in 2usize..30, deg in 1.0f64..4.0, seed: u64) {
            proptest::prop_assume!(deg < n as f64);
            let t = generate_random(&RandomSpec::new(n, deg, seed)).unwrap();
            proptest::prop_assert!(is_strongly_connected(&t));
            // dense ids map one-to-one onto names
            for (i, name) in t.nodes().iter().enumerate() {
                proptest::prop_assert_eq!(t.node_id(name), Some(i));
            }
        }

        #[test]
        fn serialize_round_trips(n in 2usize..12, seed: u64) {
            let t = generate_random(&RandomSpec::new(n, 1.5f64.min(n as f64 - 0.5), seed)).unwrap();
            let back = parse_topology(&t.serialize()).unwrap();
            proptest::prop_assert_eq!(edge_multiset(&t), edge_multiset(&back));
        }
    }
}
