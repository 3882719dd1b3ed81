//! On-the-fly greedy segment encoding of explored paths.
//!
//! A [`Label`] describes the path explored so far (the *guide*) together
//! with the segment list encoding it. Extending by one edge either pushes
//! the open (last) segment one hop further or closes it at the current node
//! and opens a new one.

use std::fmt;

use thiserror::Error;

use crate::segdb::{SegmentDb, INF};
use crate::topo::{EdgeIdx, NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// Reach the node over any IGP shortest path.
    Node(NodeId),
    /// Traverse exactly this link.
    Adjacency(EdgeIdx),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SegmentList {
    pub segments: Vec<Segment>,
}

impl SegmentList {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Renders as `node:<name>` / `adj:<src>-<dst>#<edge_id>` joined by `,`.
    pub fn display<'a>(&'a self, topo: &'a Topology) -> DisplayList<'a> {
        DisplayList { list: self, topo }
    }
}

pub struct DisplayList<'a> {
    list: &'a SegmentList,
    topo: &'a Topology,
}

impl fmt::Display for DisplayList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.list.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match *seg {
                Segment::Node(v) => write!(f, "node:{}", self.topo.name(v))?,
                Segment::Adjacency(ei) => {
                    let e = self.topo.edge(ei);
                    write!(
                        f,
                        "adj:{}-{}#{}",
                        self.topo.name(e.src),
                        self.topo.name(e.dst),
                        e.edge_id
                    )?
                }
            }
        }
        Ok(())
    }
}

/// Kind of the open segment of a label. A node segment always targets the
/// label's current node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpenKind {
    /// Initial label at the source: no segment yet.
    Empty,
    Node,
    Adjacency(EdgeIdx),
}

pub type LabelId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub at: NodeId,
    pub cost: u64,
    pub delay: u64,
    pub nsegs: u32,
    /// Source of the open segment.
    pub open_src: NodeId,
    pub open: OpenKind,
    /// Guide delay accumulated since `open_src`.
    pub open_delay: u64,
    pub pred: Option<(LabelId, EdgeIdx)>,
}

impl Label {
    pub fn source(src: NodeId) -> Self {
        Label {
            at: src,
            cost: 0,
            delay: 0,
            nsegs: 0,
            open_src: src,
            open: OpenKind::Empty,
            open_delay: 0,
            pred: None,
        }
    }

    pub fn triple(&self) -> (u64, u64, u32) {
        (self.cost, self.delay, self.nsegs)
    }
}

/// Extends `label` (stored under `id`) along edge `ei`.
///
/// The open segment is pushed when the guide stays on the shortest-path DAG
/// of `open_src` and every ECMP path from `open_src` to the new node is no
/// slower than the guide since `open_src`. Otherwise the segment is closed
/// at `label.at` and a new one opens: a node segment if the edge is itself a
/// worst-case-safe shortest path, an adjacency segment otherwise.
pub fn extend_label(
    db: &SegmentDb,
    topo: &Topology,
    label: &Label,
    id: LabelId,
    ei: EdgeIdx,
) -> Label {
    let e = topo.edge(ei);
    debug_assert_eq!(e.src, label.at);
    let v = e.dst;
    let cost = label.cost + e.cost as u64;
    let delay = label.delay + e.delay as u64;
    let pred = Some((id, ei));

    // An adjacency segment can never be pushed: it either left the DAG or
    // already beats the worst ECMP delay.
    let pushable = !matches!(label.open, OpenKind::Adjacency(_));
    let guide_delay = label.open_delay + e.delay as u64;
    if pushable
        && db.is_shortest_extension(label.open_src, e)
        && db.worst_delay(label.open_src, v) <= guide_delay
    {
        return Label {
            at: v,
            cost,
            delay,
            nsegs: label.nsegs.max(1),
            open_src: label.open_src,
            open: OpenKind::Node,
            open_delay: guide_delay,
            pred,
        };
    }

    let entry = db.lookup(label.at, v);
    let open = if e.cost as u64 == entry.igp_dist && entry.worst_delay <= e.delay as u64 {
        OpenKind::Node
    } else {
        OpenKind::Adjacency(ei)
    };
    Label {
        at: v,
        cost,
        delay,
        nsegs: label.nsegs + 1,
        open_src: label.at,
        open,
        open_delay: e.delay as u64,
        pred,
    }
}

fn open_segment(label: &Label) -> Option<Segment> {
    match label.open {
        OpenKind::Empty => None,
        OpenKind::Node => Some(Segment::Node(label.at)),
        OpenKind::Adjacency(ei) => Some(Segment::Adjacency(ei)),
    }
}

/// Walks the predecessor chain of `labels[id]`, emitting one segment per
/// close event plus the final open segment.
pub fn finalize_list(labels: &[Label], id: LabelId) -> SegmentList {
    let mut cur = &labels[id];
    let mut rev: Vec<Segment> = open_segment(cur).into_iter().collect();
    while let Some((pid, _)) = cur.pred {
        let parent = &labels[pid];
        if cur.nsegs > parent.nsegs && parent.nsegs > 0 {
            rev.extend(open_segment(parent));
        }
        cur = parent;
    }
    rev.reverse();
    debug_assert_eq!(rev.len(), labels[id].nsegs as usize);
    SegmentList { segments: rev }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error(
        "segment {index} starts at node {expected_src} but link {edge} leaves node {actual_src}"
    )]
    NotChaining {
        index: usize,
        edge: EdgeIdx,
        expected_src: NodeId,
        actual_src: NodeId,
    },
}

/// Worst-case (cost, delay) of a segment list over every ECMP realization.
/// Returns `(INF, INF)` if a node segment spans an unreachable pair.
pub fn guaranteed_distance(
    db: &SegmentDb,
    topo: &Topology,
    list: &SegmentList,
    source: NodeId,
) -> Result<(u64, u64), EncodeError> {
    let (mut cost, mut delay) = (0u64, 0u64);
    let mut at = source;
    for (index, seg) in list.segments.iter().enumerate() {
        match *seg {
            Segment::Node(t) => {
                let entry = db.lookup(at, t);
                if !entry.reachable() {
                    return Ok((INF, INF));
                }
                cost = cost.saturating_add(entry.igp_dist);
                delay = delay.saturating_add(entry.worst_delay);
                at = t;
            }
            Segment::Adjacency(ei) => {
                let e = topo.edge(ei);
                if e.src != at {
                    return Err(EncodeError::NotChaining {
                        index,
                        edge: ei,
                        expected_src: at,
                        actual_src: e.src,
                    });
                }
                cost = cost.saturating_add(e.cost as u64);
                delay = delay.saturating_add(e.delay as u64);
                at = e.dst;
            }
        }
    }
    Ok((cost, delay))
}

/// Node reached at the end of the list, or `None` if the list does not chain.
pub fn list_endpoint(topo: &Topology, list: &SegmentList, source: NodeId) -> Option<NodeId> {
    list.segments.iter().try_fold(source, |at, seg| match *seg {
        Segment::Node(t) => Some(t),
        Segment::Adjacency(ei) => {
            let e = topo.edge(ei);
            (e.src == at).then_some(e.dst)
        }
    })
}
