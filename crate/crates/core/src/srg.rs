//! Strongly regular graphs: parameter extraction, the 16-node rival
//! pair (4x4 rook's graph and the Shrikhande graph), closed-algebra
//! verification, and the degree profile of the 2-particle occupation
//! graph.

use crate::graph::Graph;
use crate::occupation::{build_occupation_graph, OccupationError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SrgError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("not regular: nodes {a} and {b} have degrees {da} and {db}")]
    NotRegular { a: usize, b: usize, da: usize, db: usize },
    #[error("adjacent pairs ({a0},{a1}) and ({b0},{b1}) have {ca} vs {cb} common neighbors")]
    NonUniformAdjacent { a0: usize, a1: usize, b0: usize, b1: usize, ca: usize, cb: usize },
    #[error("non-adjacent pairs ({a0},{a1}) and ({b0},{b1}) have {ca} vs {cb} common neighbors")]
    NonUniformNonAdjacent { a0: usize, a1: usize, b0: usize, b1: usize, ca: usize, cb: usize },
    #[error("occupation graph node {index} breaks the uniform profile: {got:?} vs {expected:?}")]
    NonUniformProfile { index: usize, expected: OccupationDegreeProfile, got: OccupationDegreeProfile },
    #[error(transparent)]
    Occupation(#[from] OccupationError),
}

/// SRG family parameters (paper naming: μ adjacent, ν non-adjacent).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub n: usize,
    pub d: usize,
    pub mu: usize,
    pub nu: usize,
}

fn common_neighbors(g: &Graph, a: usize, b: usize) -> usize {
    g.neighbors(a).iter().filter(|&&w| g.has_edge(b, w)).count()
}

/// Verifies the SRG conditions by direct counting over all pairs and
/// returns the four family parameters, or the first counterexample.
pub fn srg_params(g: &Graph) -> Result<SrgParams, SrgError> {
    if !g.is_connected() {
        return Err(SrgError::Disconnected);
    }
    let n = g.n();
    let d = g.degree(0);
    for v in 1..n {
        if g.degree(v) != d {
            return Err(SrgError::NotRegular { a: 0, b: v, da: d, db: g.degree(v) });
        }
    }
    let mut mu: Option<(usize, usize, usize)> = None;
    let mut nu: Option<(usize, usize, usize)> = None;
    for a in 0..n {
        for b in (a + 1)..n {
            let c = common_neighbors(g, a, b);
            if g.has_edge(a, b) {
                match mu {
                    None => mu = Some((a, b, c)),
                    Some((a0, a1, ca)) if ca != c => {
                        return Err(SrgError::NonUniformAdjacent { a0, a1, b0: a, b1: b, ca, cb: c });
                    }
                    _ => {}
                }
            } else {
                match nu {
                    None => nu = Some((a, b, c)),
                    Some((a0, a1, ca)) if ca != c => {
                        return Err(SrgError::NonUniformNonAdjacent { a0, a1, b0: a, b1: b, ca, cb: c });
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(SrgParams {
        n,
        d,
        mu: mu.map_or(0, |(_, _, c)| c),
        nu: nu.map_or(0, |(_, _, c)| c),
    })
}

/// 4x4 rook's graph: vertices (i, j) in Z4 x Z4, adjacent iff same row
/// or same column. SRG(16, 6, 2, 2); contains 4-cliques (full rows).
pub fn rooks_4x4() -> Graph {
    let idx = |i: usize, j: usize| 4 * i + j;
    let mut edges = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for jj in (j + 1)..4 {
                edges.push((idx(i, j), idx(i, jj)));
                edges.push((idx(j, i), idx(jj, i)));
            }
        }
    }
    Graph::from_edge_list(16, &edges).expect("valid indices")
}

/// Shrikhande graph: Cayley graph of Z4 x Z4 with connection set
/// {±(1,0), ±(0,1), ±(1,1)}. SRG(16, 6, 2, 2); 4-clique-free.
pub fn shrikhande() -> Graph {
    let idx = |i: usize, j: usize| 4 * i + j;
    let gens = [(1usize, 0usize), (0, 1), (1, 1)];
    let mut edges = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for &(di, dj) in &gens {
                edges.push((idx(i, j), idx((i + di) % 4, (j + dj) % 4)));
            }
        }
    }
    Graph::from_edge_list(16, &edges).expect("valid indices")
}

/// Petersen graph as the Kneser graph K(5,2): 2-subsets of {0..4},
/// adjacent iff disjoint. SRG(10, 3, 0, 1).
pub fn petersen() -> Graph {
    let mut subsets = Vec::new();
    for a in 0..5 {
        for b in (a + 1)..5 {
            subsets.push((a, b));
        }
    }
    let mut edges = Vec::new();
    for (i, &(a, b)) in subsets.iter().enumerate() {
        for (j, &(c, d)) in subsets.iter().enumerate().skip(i + 1) {
            if a != c && a != d && b != c && b != d {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edge_list(10, &edges).expect("valid indices")
}

/// Max absolute entry of A^2 - [d I + mu A + nu (J - I - A)], in
/// integer arithmetic. Zero exactly when the closed algebra holds.
pub fn verify_closed_algebra(g: &Graph, p: &SrgParams) -> i64 {
    let n = g.n();
    let mut max_res: i64 = 0;
    for i in 0..n {
        for j in 0..n {
            let a2 = common_neighbors_or_degree(g, i, j);
            let a = i64::from(g.has_edge(i, j));
            let eye = i64::from(i == j);
            let expected = p.d as i64 * eye + p.mu as i64 * a + p.nu as i64 * (1 - eye - a);
            max_res = max_res.max((a2 - expected).abs());
        }
    }
    max_res
}

fn common_neighbors_or_degree(g: &Graph, i: usize, j: usize) -> i64 {
    if i == j {
        g.degree(i) as i64
    } else {
        common_neighbors(g, i, j) as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairType {
    Edge,
    NonEdge,
}

/// Degree structure of one basis-node type of G^(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OccupationDegreeProfile {
    pub degree: usize,
    pub edge_type_neighbors: usize,
    pub non_edge_type_neighbors: usize,
}

/// Measures (degree, edge-type neighbor count, non-edge-type neighbor
/// count) on G^(2) for all basis nodes of the given type and asserts
/// uniformity. For a true SRG the result matches the closed forms:
/// edge type 2(d-1) with 2μ edge-type; non-edge type 2d with 2ν.
pub fn occupation_degree_profile(
    g: &Graph,
    pair_type: PairType,
) -> Result<OccupationDegreeProfile, SrgError> {
    let og = build_occupation_graph(g, 2)?;
    let is_edge = |index: usize| {
        let s = og.basis().unrank(index);
        g.has_edge(s[0], s[1])
    };
    let mut profile: Option<OccupationDegreeProfile> = None;
    for i in 0..og.dim() {
        let node_type = if is_edge(i) { PairType::Edge } else { PairType::NonEdge };
        if node_type != pair_type {
            continue;
        }
        let edge_nb = og.neighbors(i).iter().filter(|&&j| is_edge(j)).count();
        let got = OccupationDegreeProfile {
            degree: og.degree(i),
            edge_type_neighbors: edge_nb,
            non_edge_type_neighbors: og.degree(i) - edge_nb,
        };
        match profile {
            None => profile = Some(got),
            Some(expected) if expected != got => {
                return Err(SrgError::NonUniformProfile { index: i, expected, got });
            }
            _ => {}
        }
    }
    Ok(profile.expect("occupation graph has nodes of both pair types"))
}
