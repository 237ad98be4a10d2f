//! The k-particle hardcore basis (distinct k-subsets of base nodes in
//! colexicographic order) and the sparse occupation graph G^(k): basis
//! states are adjacent iff they differ in exactly one node and the two
//! differing nodes form an edge of the base graph.

use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OccupationError {
    #[error("subset has {got} entries, basis expects {expected}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("subset contains duplicate node {node}")]
    DuplicateEntry { node: usize },
    #[error("node {node} out of range for base graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("particle number k = {k} invalid for {n} base nodes")]
    InvalidParticleNumber { k: usize, n: usize },
    #[error("basis dimension {dim} exceeds limit {limit}")]
    BasisTooLarge { dim: usize, limit: usize },
}

/// Default cap on the basis dimension C(n, k).
pub const DEFAULT_BASIS_LIMIT: usize = 20_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc
}

/// Ranked k-subset basis over `n` base nodes, colexicographic order:
/// rank(S) = Σ_i C(s_i, i+1) for sorted s_0 < s_1 < ... < s_{k-1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OccupationBasis {
    n: usize,
    k: usize,
    dim: usize,
}

impl OccupationBasis {
    pub fn new(n: usize, k: usize) -> Result<Self, OccupationError> {
        Self::with_limit(n, k, DEFAULT_BASIS_LIMIT)
    }

    pub fn with_limit(n: usize, k: usize, limit: usize) -> Result<Self, OccupationError> {
        if k == 0 || k > n {
            return Err(OccupationError::InvalidParticleNumber { k, n });
        }
        let dim = binomial(n, k);
        if dim > limit as u128 {
            return Err(OccupationError::BasisTooLarge {
                dim: dim.min(usize::MAX as u128) as usize,
                limit,
            });
        }
        Ok(OccupationBasis { n, k, dim: dim as usize })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Colexicographic rank of a sorted duplicate-free k-subset.
    pub fn rank(&self, subset: &[usize]) -> Result<usize, OccupationError> {
        if subset.len() != self.k {
            return Err(OccupationError::WrongCardinality {
                expected: self.k,
                got: subset.len(),
            });
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(OccupationError::DuplicateEntry { node: w[0] });
            }
        }
        if let Some(&max) = sorted.last() {
            if max >= self.n {
                return Err(OccupationError::NodeOutOfRange { node: max, n: self.n });
            }
        }
        let mut rank: u128 = 0;
        for (i, &s) in sorted.iter().enumerate() {
            rank += binomial(s, i + 1);
        }
        Ok(rank as usize)
    }

    /// Inverse of [`rank`](Self::rank); returns the sorted subset.
    pub fn unrank(&self, index: usize) -> Vec<usize> {
        assert!(index < self.dim, "index {index} out of range {}", self.dim);
        let mut rest = index as u128;
        let mut out = vec![0; self.k];
        let mut hi = self.n;
        for i in (1..=self.k).rev() {
            // largest c with C(c, i) <= rest
            let mut c = i - 1;
            let mut best = c;
            while c < hi {
                if binomial(c, i) <= rest {
                    best = c;
                    c += 1;
                } else {
                    break;
                }
            }
            rest -= binomial(best, i);
            out[i - 1] = best;
            hi = best;
        }
        out
    }

    /// Iterates subsets in rank order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dim).map(|i| self.unrank(i))
    }
}

/// Sparse symmetric adjacency of G^(k), stored CSR-style with sorted
/// neighbor lists per row.
#[derive(Clone, Debug)]
pub struct OccupationGraph {
    basis: OccupationBasis,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
}

pub fn build_occupation_graph(g: &Graph, k: usize) -> Result<OccupationGraph, OccupationError> {
    build_occupation_graph_with_limit(g, k, DEFAULT_BASIS_LIMIT)
}

pub fn build_occupation_graph_with_limit(
    g: &Graph,
    k: usize,
    limit: usize,
) -> Result<OccupationGraph, OccupationError> {
    let basis = OccupationBasis::with_limit(g.n(), k, limit)?;
    let dim = basis.dim();
    let mut row_offsets = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    row_offsets.push(0);
    let mut in_subset = vec![false; g.n()];
    for index in 0..dim {
        let subset = basis.unrank(index);
        for &v in &subset {
            in_subset[v] = true;
        }
        let mut row = Vec::new();
        let mut scratch = subset.clone();
        for (pos, &v) in subset.iter().enumerate() {
            for &w in g.neighbors(v) {
                if in_subset[w] {
                    continue;
                }
                scratch[pos] = w;
                row.push(basis.rank(&scratch).expect("hop target is a valid subset"));
            }
            scratch[pos] = v;
        }
        row.sort_unstable();
        cols.extend_from_slice(&row);
        row_offsets.push(cols.len());
        for &v in &subset {
            in_subset[v] = false;
        }
    }
    Ok(OccupationGraph { basis, row_offsets, cols })
}

impl OccupationGraph {
    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.cols[self.row_offsets[index]..self.row_offsets[index + 1]]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.row_offsets[index + 1] - self.row_offsets[index]
    }

    pub fn num_edges(&self) -> usize {
        self.cols.len() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Undirected edges `(i, j)` with `i < j`.
    pub fn edges_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| i < j)
                .map(move |&j| (i, j))
        })
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim();
        let mut m = nalgebra::DMatrix::zeros(d, d);
        for (i, j) in self.edges_iter() {
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
        }
        m
    }

    /// y = A x for complex x.
    pub fn matvec(&self, x: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let mut y = vec![num_complex::Complex64::new(0.0, 0.0); self.dim()];
        for i in 0..self.dim() {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for &j in self.neighbors(i) {
                acc += x[j];
            }
            y[i] = acc;
        }
        y
    }
}
