//! Non-interacting boson and fermion multiparticle walk amplitudes:
//! permanents and determinants of single-particle unitary submatrices.
//! Hardcore (XY) walks route through `occupation` + `evolve` instead.

use crate::evolve::SpectralDecomposition;
use crate::graph::Graph;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("configurations have sizes {from} and {to}, expected equal")]
    SizeMismatch { from: usize, to: usize },
    #[error("fermion configuration contains duplicate node {node}")]
    FermionDuplicate { node: usize },
    #[error("hardcore statistics route through the occupation-graph walk, not this module")]
    HardcoreNotSupported,
    #[error("input state norm {0} violates normalization")]
    NotNormalized(f64),
    #[error("particle number {0} exceeds the direct permanent range (4)")]
    TooManyParticles(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParticleStatistics {
    Hardcore,
    Boson,
    Fermion,
}

/// Sorted multiset of node indices; fermion configurations must be
/// duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new(mut nodes: Vec<usize>) -> Self {
        nodes.sort_unstable();
        Configuration(nodes)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_duplicates(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    /// Product of factorials of entry multiplicities.
    pub fn multiplicity_factorial(&self) -> f64 {
        let mut acc = 1.0;
        let mut run = 1;
        for i in 1..self.0.len() {
            if self.0[i] == self.0[i - 1] {
                run += 1;
                acc *= run as f64;
            } else {
                run = 1;
            }
        }
        acc
    }
}

/// All distinct k-subsets of [0, n), colexicographic order (shared
/// with the hardcore occupation basis).
pub fn distinct_configurations(n: usize, k: usize) -> Vec<Configuration> {
    let basis = crate::occupation::OccupationBasis::with_limit(n, k, usize::MAX)
        .expect("valid basis");
    basis.iter().map(Configuration::new).collect()
}

/// All k-multisets of [0, n) (repeats allowed), lexicographic order.
pub fn multiset_configurations(n: usize, k: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Configuration>) {
        if current.len() == k {
            out.push(Configuration(current.clone()));
            return;
        }
        for v in start..n {
            current.push(v);
            rec(n, k, v, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    out
}

/// exp(-iAθ) for the base-graph adjacency A, via dense spectral
/// decomposition.
pub fn single_particle_unitary(g: &Graph, theta: f64) -> DMatrix<Complex64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    SpectralDecomposition::new(&a).propagator(theta)
}

/// Permanent by direct permutation sum; k <= 4 only (at most 24 terms).
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64, StatsError> {
    signed_permutation_sum(m, false)
}

/// Determinant by direct signed permutation sum; k <= 4 only.
pub fn determinant(m: &DMatrix<Complex64>) -> Result<Complex64, StatsError> {
    signed_permutation_sum(m, true)
}

fn signed_permutation_sum(m: &DMatrix<Complex64>, signed: bool) -> Result<Complex64, StatsError> {
    let k = m.nrows();
    if k > 4 {
        return Err(StatsError::TooManyParticles(k));
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        for (row, &col) in perm.iter().enumerate() {
            term *= m[(row, col)];
        }
        if signed && parity(&perm) {
            total -= term;
        } else {
            total += term;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

fn parity(perm: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Multiparticle transition amplitude `from -> to` under the given
/// statistics: fermions take the determinant of the k x k submatrix
/// U[to, from] (rows and columns in sorted order), bosons the
/// permanent normalized by sqrt of the multiplicity factorials.
pub fn transition_amplitude(
    u: &DMatrix<Complex64>,
    from: &Configuration,
    to: &Configuration,
    stats: ParticleStatistics,
) -> Result<Complex64, StatsError> {
    if from.len() != to.len() {
        return Err(StatsError::SizeMismatch { from: from.len(), to: to.len() });
    }
    let k = from.len();
    let sub = DMatrix::from_fn(k, k, |r, c| u[(to.nodes()[r], from.nodes()[c])]);
    match stats {
        ParticleStatistics::Hardcore => Err(StatsError::HardcoreNotSupported),
        ParticleStatistics::Fermion => {
            for cfg in [from, to] {
                if cfg.has_duplicates() {
                    let node = cfg.nodes().windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                    return Err(StatsError::FermionDuplicate { node });
                }
            }
            determinant(&sub)
        }
        ParticleStatistics::Boson => {
            let norm = (from.multiplicity_factorial() * to.multiplicity_factorial()).sqrt();
            Ok(permanent(&sub)? / norm)
        }
    }
}

/// Output probability for each target configuration given input
/// amplitudes over `input_basis`. Targets are all distinct k-subsets
/// for fermions and all k-multisets for bosons, so each distribution
/// sums to 1.
pub fn output_distribution(
    u: &DMatrix<Complex64>,
    input_basis: &[Configuration],
    psi_in: &[Complex64],
    stats: ParticleStatistics,
) -> Result<Vec<f64>, StatsError> {
    assert_eq!(input_basis.len(), psi_in.len());
    if stats == ParticleStatistics::Hardcore {
        return Err(StatsError::HardcoreNotSupported);
    }
    let norm: f64 = psi_in.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(StatsError::NotNormalized(norm.sqrt()));
    }
    let k = input_basis.first().map_or(0, Configuration::len);
    let targets = match stats {
        ParticleStatistics::Fermion => distinct_configurations(u.nrows(), k),
        ParticleStatistics::Boson => multiset_configurations(u.nrows(), k),
        ParticleStatistics::Hardcore => unreachable!(),
    };
    targets
        .par_iter()
        .map(|target| {
            let mut amp = Complex64::new(0.0, 0.0);
            for (b, &coeff) in input_basis.iter().zip(psi_in) {
                if coeff != Complex64::new(0.0, 0.0) {
                    amp += coeff * transition_amplitude(u, b, target, stats)?;
                }
            }
            Ok(amp.norm_sqr())
        })
        .collect()
}
