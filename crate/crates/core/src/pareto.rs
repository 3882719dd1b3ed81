//! Plain Pareto filtering on (cost, delay, nsegs) triples.

pub type Triple = (u64, u64, u32);

pub fn dominates_or_equal(a: &Triple, b: &Triple) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && a.2 <= b.2
}

/// Distinct non-dominated triples, sorted ascending.
pub fn pareto_filter(triples: impl IntoIterator<Item = Triple>) -> Vec<Triple> {
    let mut all: Vec<Triple> = triples.into_iter().collect();
    all.sort_unstable();
    all.dedup();
    let mut front: Vec<Triple> = Vec::new();
    // Sorted order means no later triple can dominate an earlier one.
    for t in all {
        if !front.iter().any(|f| dominates_or_equal(f, &t)) {
            front.push(t);
        }
    }
    front
}
