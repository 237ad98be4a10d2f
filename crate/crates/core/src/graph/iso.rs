//! Exact desk-scale isomorphism oracle: backtracking with
//! individualization and joint color refinement. Refinement is a
//! pruning heuristic only; the backtracking search is the correctness
//! backstop (CFI graphs defeat refinement alone).

use super::Graph;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("oracle out of range: {n} nodes exceeds limit {limit}")]
    NodeLimitExceeded { n: usize, limit: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct IsoConfig {
    /// Largest graph the oracle will accept. Exceeding it is an error,
    /// never a wrong answer.
    pub node_limit: usize,
}

impl Default for IsoConfig {
    fn default() -> Self {
        IsoConfig { node_limit: 64 }
    }
}

/// Exact isomorphism test with the default node limit (64). Returns a
/// witness permutation `perm` with `g2 = permute(g1, perm)` when the
/// graphs are isomorphic; the witness is re-verified edge-by-edge
/// before being returned.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<Option<Vec<usize>>, IsoError> {
    are_isomorphic_with(g1, g2, &IsoConfig::default())
}

pub fn are_isomorphic_with(
    g1: &Graph,
    g2: &Graph,
    config: &IsoConfig,
) -> Result<Option<Vec<usize>>, IsoError> {
    let n = g1.n();
    if n > config.node_limit || g2.n() > config.node_limit {
        return Err(IsoError::NodeLimitExceeded {
            n: n.max(g2.n()),
            limit: config.node_limit,
        });
    }
    if n != g2.n() || g1.num_edges() != g2.num_edges() {
        return Ok(None);
    }
    if g1.degree_sequence() != g2.degree_sequence() {
        return Ok(None);
    }
    let init1: Vec<usize> = (0..n).map(|v| g1.degree(v)).collect();
    let init2: Vec<usize> = (0..n).map(|v| g2.degree(v)).collect();
    let Some((c1, c2)) = refine(g1, g2, init1, init2) else {
        return Ok(None);
    };
    let found = search(g1, g2, &c1, &c2);
    if let Some(perm) = &found {
        debug_assert!(verify_witness(g1, g2, perm));
        if !verify_witness(g1, g2, perm) {
            return Ok(None);
        }
    }
    Ok(found)
}

/// Checks that `perm` maps `g1` onto `g2` edge-by-edge.
pub(crate) fn verify_witness(g1: &Graph, g2: &Graph, perm: &[usize]) -> bool {
    if perm.len() != g1.n() || g1.num_edges() != g2.num_edges() {
        return false;
    }
    g1.edges()
        .iter()
        .all(|&(i, j)| g2.has_edge(perm[i], perm[j]))
}

/// Joint stable color refinement. Returns `None` as soon as the two
/// color histograms diverge.
fn refine(
    g1: &Graph,
    g2: &Graph,
    init1: Vec<usize>,
    init2: Vec<usize>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = g1.n();
    let mut c1 = init1;
    let mut c2 = init2;
    // normalize initial colors through one shared interning table
    let mut intern: HashMap<usize, usize> = HashMap::new();
    for c in c1.iter_mut().chain(c2.iter_mut()) {
        let next = intern.len();
        *c = *intern.entry(*c).or_insert(next);
    }
    if !histograms_match(&c1, &c2) {
        return None;
    }
    let mut num_colors = count_colors(&c1, &c2);
    loop {
        let mut intern: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut step = |g: &Graph, c: &[usize]| -> Vec<usize> {
            (0..n)
                .map(|v| {
                    let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| c[w]).collect();
                    nb.sort_unstable();
                    let next = intern.len();
                    *intern.entry((c[v], nb)).or_insert(next)
                })
                .collect()
        };
        let n1 = step(g1, &c1);
        let n2 = step(g2, &c2);
        if !histograms_match(&n1, &n2) {
            return None;
        }
        let new_count = count_colors(&n1, &n2);
        c1 = n1;
        c2 = n2;
        if new_count == num_colors {
            return Some((c1, c2));
        }
        num_colors = new_count;
    }
}

fn histograms_match(c1: &[usize], c2: &[usize]) -> bool {
    let mut h1 = c1.to_vec();
    let mut h2 = c2.to_vec();
    h1.sort_unstable();
    h2.sort_unstable();
    h1 == h2
}

fn count_colors(c1: &[usize], c2: &[usize]) -> usize {
    let mut all: Vec<usize> = c1.iter().chain(c2).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn search(g1: &Graph, g2: &Graph, c1: &[usize], c2: &[usize]) -> Option<Vec<usize>> {
    let n = g1.n();
    // pick the smallest non-singleton color class in g1
    let mut class_size: HashMap<usize, usize> = HashMap::new();
    for &c in c1 {
        *class_size.entry(c).or_insert(0) += 1;
    }
    let target = class_size
        .iter()
        .filter(|&(_, &s)| s > 1)
        .min_by_key(|&(&c, &s)| (s, c))
        .map(|(&c, _)| c);
    let Some(target) = target else {
        // coloring is discrete: the map is forced by color
        let mut pos2: HashMap<usize, usize> = HashMap::new();
        for (w, &c) in c2.iter().enumerate() {
            pos2.insert(c, w);
        }
        let perm: Vec<usize> = c1.iter().map(|c| pos2[c]).collect();
        return verify_witness(g1, g2, &perm).then_some(perm);
    };
    let v = (0..n).find(|&v| c1[v] == target).unwrap();
    let fresh = 2 * n + 1;
    for w in 0..n {
        if c2[w] != target {
            continue;
        }
        let mut i1 = c1.to_vec();
        let mut i2 = c2.to_vec();
        i1[v] = fresh;
        i2[w] = fresh;
        if let Some((r1, r2)) = refine(g1, g2, i1, i2) {
            if let Some(perm) = search(g1, g2, &r1, &r2) {
                return Some(perm);
            }
        }
    }
    None
}
