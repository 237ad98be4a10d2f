//! Rival CFI pair constructions over the complete base graph K_{k+1}:
//! the Morris-style pair (even vs odd subsets at vertex 0) and the
//! Cai-Fürer-Immerman gadget pair (untwisted vs one twisted edge).
//!
//! Subset enumeration uses a binary counter over the lexicographically
//! sorted incident-edge list, so node indices are reproducible across
//! runs.

use crate::graph::{BaseEdge, Graph, NodeLabel, OuterTag};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CfiError {
    #[error("k = {k} outside supported range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
}

const K_MAX: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfiConstruction {
    Morris,
    Cai,
}

/// A rival pair (P, Q): equal size, equal edge count, non-isomorphic.
#[derive(Clone, Debug)]
pub struct CfiPair {
    pub p: Graph,
    pub q: Graph,
    pub k: usize,
    pub construction: CfiConstruction,
}

fn base_edges(k: usize) -> Vec<BaseEdge> {
    let mut edges = Vec::new();
    for i in 0..=k {
        for j in (i + 1)..=k {
            edges.push((i, j));
        }
    }
    edges
}

fn incident(edges: &[BaseEdge], v: usize) -> Vec<BaseEdge> {
    edges.iter().copied().filter(|&(a, b)| a == v || b == v).collect()
}

/// All subsets of `ev` with the given parity of cardinality, in binary
/// counter order (the empty set first for even parity).
fn parity_subsets(ev: &[BaseEdge], odd: bool) -> Vec<Vec<BaseEdge>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << ev.len()) {
        if (mask.count_ones() % 2 == 1) == odd {
            let s: Vec<BaseEdge> = ev
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            out.push(s);
        }
    }
    out
}

/// Morris-style pair. P_k: top nodes `(v, S)` for every even-size
/// subset S of E(v), bottom nodes `e^0`, `e^1` per base edge; edges
/// `e^0 - e^1`, `(v,S) - e^1` iff `v ∈ e ∧ e ∈ S`, `(v,S) - e^0` iff
/// `v ∈ e ∧ e ∉ S`. Q_k is identical except vertex 0 uses odd subsets.
pub fn build_morris_pair(k: usize) -> Result<CfiPair, CfiError> {
    if k == 0 || k > K_MAX {
        return Err(CfiError::KOutOfRange { k, max: K_MAX });
    }
    Ok(CfiPair {
        p: build_morris(k, None),
        q: build_morris(k, Some(0)),
        k,
        construction: CfiConstruction::Morris,
    })
}

fn build_morris(k: usize, odd_vertex: Option<usize>) -> Graph {
    let kedges = base_edges(k);
    let mut labels = Vec::new();
    for v in 0..=k {
        let ev = incident(&kedges, v);
        for subset in parity_subsets(&ev, odd_vertex == Some(v)) {
            labels.push(NodeLabel::Top { vertex: v, subset });
        }
    }
    let bottom_start = labels.len();
    for &e in &kedges {
        labels.push(NodeLabel::Bottom { edge: e, bit: 0 });
        labels.push(NodeLabel::Bottom { edge: e, bit: 1 });
    }
    let bottom_index = |edge_pos: usize, bit: usize| bottom_start + 2 * edge_pos + bit;

    let mut edges = Vec::new();
    for (pos, _) in kedges.iter().enumerate() {
        edges.push((bottom_index(pos, 0), bottom_index(pos, 1)));
    }
    for (i, label) in labels.iter().enumerate() {
        if let NodeLabel::Top { vertex, subset } = label {
            for (pos, &e) in kedges.iter().enumerate() {
                if e.0 == *vertex || e.1 == *vertex {
                    let bit = usize::from(subset.contains(&e));
                    edges.push((i, bottom_index(pos, bit)));
                }
            }
        }
    }
    Graph::with_labels(labels, &edges).expect("construction produces valid indices")
}

/// Cai gadget pair. Per base vertex v: middle nodes `m_{v,S}` for even
/// subsets S of E(v); outer nodes `a_{v,e}`, `b_{v,e}` per incident
/// edge; `m_{v,S} - a_{v,e}` iff `e ∈ S`, else `m_{v,S} - b_{v,e}`.
/// P links `a_{u,e} - a_{v,e}` and `b_{u,e} - b_{v,e}` per base edge;
/// Q crosses the link on the single edge {0,1}.
pub fn build_cai_pair(k: usize) -> Result<CfiPair, CfiError> {
    if k == 0 || k > K_MAX {
        return Err(CfiError::KOutOfRange { k, max: K_MAX });
    }
    Ok(CfiPair {
        p: build_cai(k, false),
        q: build_cai(k, true),
        k,
        construction: CfiConstruction::Cai,
    })
}

fn build_cai(k: usize, twist: bool) -> Graph {
    let kedges = base_edges(k);
    let mut labels = Vec::new();
    for v in 0..=k {
        let ev = incident(&kedges, v);
        for subset in parity_subsets(&ev, false) {
            labels.push(NodeLabel::Top { vertex: v, subset });
        }
    }
    let outer_start = labels.len();
    let mut outer_pos = std::collections::HashMap::new();
    for v in 0..=k {
        for e in incident(&kedges, v) {
            outer_pos.insert((v, e), labels.len() - outer_start);
            labels.push(NodeLabel::Outer { vertex: v, edge: e, tag: OuterTag::A });
            labels.push(NodeLabel::Outer { vertex: v, edge: e, tag: OuterTag::B });
        }
    }
    let outer = |v: usize, e: BaseEdge, tag: OuterTag| {
        outer_start + outer_pos[&(v, e)] + usize::from(tag == OuterTag::B)
    };

    let mut edges = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        if let NodeLabel::Top { vertex, subset } = label {
            for e in incident(&kedges, *vertex) {
                let tag = if subset.contains(&e) { OuterTag::A } else { OuterTag::B };
                edges.push((i, outer(*vertex, e, tag)));
            }
        }
    }
    for &e in &kedges {
        let (u, v) = e;
        if twist && e == (0, 1) {
            edges.push((outer(u, e, OuterTag::A), outer(v, e, OuterTag::B)));
            edges.push((outer(u, e, OuterTag::B), outer(v, e, OuterTag::A)));
        } else {
            edges.push((outer(u, e, OuterTag::A), outer(v, e, OuterTag::A)));
            edges.push((outer(u, e, OuterTag::B), outer(v, e, OuterTag::B)));
        }
    }
    Graph::with_labels(labels, &edges).expect("construction produces valid indices")
}

/// Expected Morris node count: (k+1)·2^(k−1) + 2·C(k+1,2).
pub fn morris_node_count(k: usize) -> usize {
    (k + 1) * (1 << (k - 1)) + k * (k + 1)
}

/// Expected Cai node count: (k+1)·2^(k−1) + 4·C(k+1,2).
pub fn cai_node_count(k: usize) -> usize {
    (k + 1) * (1 << (k - 1)) + 2 * k * (k + 1)
}

/// The 2-cliques that witness non-isomorphism: size-(k+1) sets of
/// degree-k top nodes at pairwise-distinct base vertices, pairwise at
/// hop distance 2. Present in P_k, absent in Q_k. (Without the
/// distinct-vertex restriction, the 2^(k-1) gadget tops at one base
/// vertex are themselves pairwise at distance 2, so for k >= 3 both
/// graphs contain unrestricted 2-cliques.)
pub fn witness_2_cliques(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    g.find_2_cliques(k + 1, Some(k))
        .into_iter()
        .filter(|set| {
            let mut vertices: Vec<usize> = set
                .iter()
                .filter_map(|&i| match g.label(i) {
                    NodeLabel::Top { vertex, .. } => Some(*vertex),
                    _ => None,
                })
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            vertices.len() == set.len()
        })
        .collect()
}
