//! Undirected simple graphs with stable node labels, hop distances,
//! 2-clique enumeration, permutation, and serialization.

mod format;
mod iso;

pub use format::{
    parse_edge_list, parse_graph6, write_edge_list, write_graph6, FormatError,
};
pub use iso::{are_isomorphic, are_isomorphic_with, IsoConfig, IsoError};

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Base edge of a construction, stored with endpoints sorted.
pub type BaseEdge = (usize, usize);

/// Endpoint tag for the outer nodes of the Cai gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OuterTag {
    A,
    B,
}

/// Node label. Labels are payload carried along with nodes; every
/// algorithm in this crate operates on indices only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeLabel {
    /// Plain integer id.
    Index(usize),
    /// Morris top node `(v, S)` / Cai middle node: base vertex plus an
    /// edge subset (sorted).
    Top { vertex: usize, subset: Vec<BaseEdge> },
    /// Morris bottom node `e^bit`.
    Bottom { edge: BaseEdge, bit: u8 },
    /// Cai outer node `a_{v,e}` / `b_{v,e}`.
    Outer { vertex: usize, edge: BaseEdge, tag: OuterTag },
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::Index(i) => write!(f, "{i}"),
            NodeLabel::Top { vertex, subset } => {
                let s: Vec<String> =
                    subset.iter().map(|(a, b)| format!("{a}{b}")).collect();
                write!(f, "({vertex},{{{}}})", s.join(","))
            }
            NodeLabel::Bottom { edge, bit } => write!(f, "{}{}^{bit}", edge.0, edge.1),
            NodeLabel::Outer { vertex, edge, tag } => {
                let t = match tag {
                    OuterTag::A => 'a',
                    OuterTag::B => 'b',
                };
                write!(f, "{t}_{{{vertex},{}{}}}", edge.0, edge.1)
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("label count {labels} does not match node count {n}")]
    LabelCountMismatch { labels: usize, n: usize },
    #[error("permutation is not a bijection on [0, {n})")]
    NotAPermutation { n: usize },
}

/// Undirected simple graph. Edges are stored sorted with `i < j`;
/// adjacency lists are sorted. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<NodeLabel>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on `n` nodes with integer labels `0..n`.
    /// Duplicate pairs collapse; self-loops and out-of-range endpoints
    /// are rejected.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let labels = (0..n).map(NodeLabel::Index).collect();
        Graph::with_labels(labels, edges)
    }

    /// Builds a graph whose node count is the label count.
    pub fn with_labels(
        labels: Vec<NodeLabel>,
        edges: &[(usize, usize)],
    ) -> Result<Graph, GraphError> {
        let n = labels.len();
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i >= n {
                return Err(GraphError::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(GraphError::IndexOutOfRange { index: j, n });
            }
            if i == j {
                return Err(GraphError::SelfLoop { node: i });
            }
            set.insert((i.min(j), i.max(j)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Graph { labels, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &NodeLabel {
        &self.labels[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Node degrees in non-decreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let d = bfs_distances(self, 0);
        d.iter().all(|&x| x != UNREACHABLE)
    }

    /// Exact hop distances between all node pairs (BFS from each node).
    pub fn all_pairs_distances(&self) -> DistanceMatrix {
        let n = self.n();
        let mut data = Vec::with_capacity(n * n);
        for s in 0..n {
            data.extend_from_slice(&bfs_distances(self, s));
        }
        DistanceMatrix { n, data }
    }

    /// All node sets of the given size whose members are pairwise at
    /// hop distance exactly 2, optionally restricted to nodes of a
    /// fixed degree. Exact enumeration; sets returned sorted.
    pub fn find_2_cliques(&self, size: usize, degree_filter: Option<usize>) -> Vec<Vec<usize>> {
        assert!(size >= 2, "2-clique size must be at least 2");
        let dist = self.all_pairs_distances();
        let candidates: Vec<usize> = (0..self.n())
            .filter(|&v| degree_filter.map_or(true, |d| self.degree(v) == d))
            .collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        extend_2_clique(&candidates, &dist, size, 0, &mut current, &mut out);
        out
    }

    /// Relabels node indices by `perm`: edge `(i, j)` becomes
    /// `(perm[i], perm[j])` and node `i`'s label travels to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.n();
        if perm.len() != n {
            return Err(GraphError::NotAPermutation { n });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(GraphError::NotAPermutation { n });
            }
            seen[p] = true;
        }
        let mut labels = vec![NodeLabel::Index(0); n];
        for (i, l) in self.labels.iter().enumerate() {
            labels[perm[i]] = l.clone();
        }
        let edges: Vec<(usize, usize)> =
            self.edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        Graph::with_labels(labels, &edges)
    }
}

fn extend_2_clique(
    candidates: &[usize],
    dist: &DistanceMatrix,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for idx in start..candidates.len() {
        let v = candidates[idx];
        if current.iter().all(|&u| dist.get(u, v) == Some(2)) {
            current.push(v);
            extend_2_clique(candidates, dist, size, idx + 1, current, out);
            current.pop();
        }
    }
}

const UNREACHABLE: u32 = u32::MAX;

fn bfs_distances(g: &Graph, source: usize) -> Vec<u32> {
    let mut d = vec![UNREACHABLE; g.n()];
    d[source] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if d[w] == UNREACHABLE {
                d[w] = d[v] + 1;
                queue.push_back(w);
            }
        }
    }
    d
}

/// All-pairs hop distances; `get` returns `None` for unreachable pairs.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.data[i * self.n + j];
        (d != UNREACHABLE).then_some(d)
    }
}
