//! Segment-routing path computation.
//!
//! Computes Pareto-optimal (IGP cost, delay, segment count) segment lists
//! that respect a maximum segment depth, by encoding explored paths into
//! segments during a multi-metric label-setting search. A clique-transform
//! baseline and a brute-force enumerator compute the same object by other
//! means.

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod encoder;
pub mod engine;
pub mod oracle;
pub mod pareto;
pub mod pathfinder;
pub mod segdb;
pub mod topo;

pub use encoder::{Label, Segment, SegmentList};
pub use engine::{Context, Engine, Registry};
pub use pathfinder::{dclc, solve, DiversityMode, PathSolution, Query, Solutions};
pub use segdb::{build_segment_db, SegmentDb};
pub use topo::{parse_topology, NodeId, Topology};
