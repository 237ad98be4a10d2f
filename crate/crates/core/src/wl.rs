//! Classical reference tests: 1-WL color refinement and oblivious
//! k-WL tuple refinement. Comparing two graphs always runs refinement
//! jointly (on the disjoint union) so color ids are commensurable;
//! colors are interned by canonical signature, so there are no hash
//! collisions by construction.

use crate::graph::Graph;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WlError {
    #[error("arity mismatch: {a} vs {b}")]
    ArityMismatch { a: usize, b: usize },
    #[error("colorings come from different interning sessions; rerun jointly")]
    SessionMismatch,
    #[error("k-WL requires k >= 2, got {0}")]
    ArityTooSmall(usize),
    #[error("tuple count {tuples} exceeds guard {guard}")]
    GuardExceeded { tuples: usize, guard: usize },
}

/// Default cap on the total ordered-tuple count for k-WL.
pub const DEFAULT_TUPLE_GUARD: usize = 1_000_000;

static SESSION_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Stable coloring of nodes (arity 1) or ordered k-tuples.
#[derive(Clone, Debug)]
pub struct WlColoring {
    pub arity: usize,
    /// Final color per tuple, tuples in row-major order over V^k.
    pub colors: Vec<usize>,
    /// Refinement rounds until stabilization.
    pub rounds: usize,
    /// color -> tuple count.
    pub histogram: BTreeMap<usize, usize>,
    session: u64,
}

impl WlColoring {
    fn new(arity: usize, colors: Vec<usize>, rounds: usize, session: u64) -> Self {
        let mut histogram = BTreeMap::new();
        for &c in &colors {
            *histogram.entry(c).or_insert(0) += 1;
        }
        WlColoring { arity, colors, rounds, histogram, session }
    }

    pub fn num_classes(&self) -> usize {
        self.histogram.len()
    }
}

/// Multiset equality of two histograms from one joint session.
pub fn histograms_equal(a: &WlColoring, b: &WlColoring) -> Result<bool, WlError> {
    if a.arity != b.arity {
        return Err(WlError::ArityMismatch { a: a.arity, b: b.arity });
    }
    if a.session != b.session {
        return Err(WlError::SessionMismatch);
    }
    Ok(a.histogram == b.histogram)
}

/// Classic 1-WL on all graphs jointly: initial color = degree, then
/// color <- intern(color, sorted multiset of neighbor colors) until
/// the class count stabilizes.
pub fn color_refinement_joint(graphs: &[&Graph]) -> Vec<WlColoring> {
    let session = SESSION_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut colors: Vec<Vec<usize>> = Vec::new();
    {
        let mut intern: HashMap<usize, usize> = HashMap::new();
        for g in graphs {
            colors.push(
                (0..g.n())
                    .map(|v| {
                        let next = intern.len();
                        *intern.entry(g.degree(v)).or_insert(next)
                    })
                    .collect(),
            );
        }
    }
    let mut num_classes = class_count(&colors);
    let mut rounds = 0;
    loop {
        let mut intern: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<Vec<usize>> = graphs
            .iter()
            .zip(&colors)
            .map(|(g, c)| {
                (0..g.n())
                    .map(|v| {
                        let mut nb: Vec<usize> =
                            g.neighbors(v).iter().map(|&w| c[w]).collect();
                        nb.sort_unstable();
                        let next = intern.len();
                        *intern.entry((c[v], nb)).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        rounds += 1;
        let new_count = class_count(&next);
        colors = next;
        if new_count == num_classes {
            break;
        }
        num_classes = new_count;
    }
    colors
        .into_iter()
        .map(|c| WlColoring::new(1, c, rounds, session))
        .collect()
}

pub fn color_refinement(g: &Graph) -> WlColoring {
    color_refinement_joint(&[g]).pop().unwrap()
}

fn class_count(colors: &[Vec<usize>]) -> usize {
    let mut all: Vec<usize> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Oblivious k-WL on all graphs jointly. Tuples are ordered k-tuples
/// with repeats; the initial color is the isomorphism type of the
/// ordered induced subgraph (adjacency pattern plus equality pattern);
/// refinement replaces each position by every node of the same graph
/// and collects per-position sorted color multisets.
pub fn k_wl_joint(graphs: &[&Graph], k: usize) -> Result<Vec<WlColoring>, WlError> {
    k_wl_joint_with_guard(graphs, k, DEFAULT_TUPLE_GUARD)
}

pub fn k_wl_joint_with_guard(
    graphs: &[&Graph],
    k: usize,
    guard: usize,
) -> Result<Vec<WlColoring>, WlError> {
    if k < 2 {
        return Err(WlError::ArityTooSmall(k));
    }
    let tuple_counts: Vec<usize> = graphs.iter().map(|g| g.n().pow(k as u32)).collect();
    let total: usize = tuple_counts.iter().sum();
    if total > guard {
        return Err(WlError::GuardExceeded { tuples: total, guard });
    }
    let session = SESSION_COUNTER.fetch_add(1, Ordering::Relaxed);

    // tuple index <-> tuple decoding is row-major base-n
    let decode = |g: &Graph, mut idx: usize| -> Vec<usize> {
        let n = g.n();
        let mut t = vec![0; k];
        for pos in (0..k).rev() {
            t[pos] = idx % n;
            idx /= n;
        }
        t
    };

    let mut colors: Vec<Vec<usize>> = Vec::new();
    {
        let mut intern: HashMap<Vec<u8>, usize> = HashMap::new();
        for (gi, g) in graphs.iter().enumerate() {
            let mut c = Vec::with_capacity(tuple_counts[gi]);
            for idx in 0..tuple_counts[gi] {
                let t = decode(g, idx);
                let mut sig = Vec::with_capacity(k * k);
                for &a in &t {
                    for &b in &t {
                        sig.push(u8::from(g.has_edge(a, b)) | (u8::from(a == b) << 1));
                    }
                }
                let next = intern.len();
                c.push(*intern.entry(sig).or_insert(next));
            }
            colors.push(c);
        }
    }
    let mut num_classes = class_count(&colors);
    let mut rounds = 0;
    loop {
        let mut intern: HashMap<(usize, Vec<Vec<usize>>), usize> = HashMap::new();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for (gi, g) in graphs.iter().enumerate() {
            let n = g.n();
            let c = &colors[gi];
            let mut out = Vec::with_capacity(tuple_counts[gi]);
            // stride of position j in the row-major tuple index
            let stride = |j: usize| n.pow((k - 1 - j) as u32);
            for idx in 0..tuple_counts[gi] {
                let t = decode(g, idx);
                let mut per_position = Vec::with_capacity(k);
                for j in 0..k {
                    let base = idx - t[j] * stride(j);
                    let mut ms: Vec<usize> =
                        (0..n).map(|w| c[base + w * stride(j)]).collect();
                    ms.sort_unstable();
                    per_position.push(ms);
                }
                let next_id = intern.len();
                out.push(*intern.entry((c[idx], per_position)).or_insert(next_id));
            }
            next.push(out);
        }
        rounds += 1;
        let new_count = class_count(&next);
        colors = next;
        if new_count == num_classes {
            break;
        }
        num_classes = new_count;
    }
    Ok(colors
        .into_iter()
        .map(|c| WlColoring::new(k, c, rounds, session))
        .collect())
}

pub fn k_wl(g: &Graph, k: usize) -> Result<WlColoring, WlError> {
    Ok(k_wl_joint(&[g], k)?.pop().unwrap())
}

/// Joint comparison of two graphs at the given arity (1 = classic
/// color refinement).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WlComparison {
    pub arity: usize,
    pub rounds_a: usize,
    pub rounds_b: usize,
    pub classes_a: usize,
    pub classes_b: usize,
    pub histograms_equal: bool,
}

pub fn compare(g1: &Graph, g2: &Graph, arity: usize) -> Result<WlComparison, WlError> {
    let mut colorings = if arity == 1 {
        color_refinement_joint(&[g1, g2])
    } else {
        k_wl_joint(&[g1, g2], arity)?
    };
    let b = colorings.pop().unwrap();
    let a = colorings.pop().unwrap();
    let equal = histograms_equal(&a, &b)?;
    Ok(WlComparison {
        arity,
        rounds_a: a.rounds,
        rounds_b: b.rounds,
        classes_a: a.num_classes(),
        classes_b: b.num_classes(),
        histograms_equal: equal,
    })
}
