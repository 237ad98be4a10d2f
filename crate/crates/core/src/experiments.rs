//! Distinguishing experiments on a graph pair: build the occupation
//! graphs, run a walk with a chosen input mode and particle
//! statistics, and compute the sorted-L1 gap Δ.

use crate::evolve::{
    self, evolve_krylov, probability_list, time_averaged_distribution, uniform_superposition,
    EvolveError, SpectralDecomposition, StateVector, KRYLOV_TOL,
};
use crate::graph::Graph;
use crate::occupation::{
    build_occupation_graph_with_limit, OccupationError, DEFAULT_BASIS_LIMIT,
};
use crate::stats::{
    distinct_configurations, multiset_configurations, output_distribution,
    single_particle_unitary, transition_amplitude, ParticleStatistics, StatsError,
};
use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("probability lists have lengths {a} and {b}; graphs are structurally mismatched")]
    LengthMismatch { a: usize, b: usize },
    #[error("occupation graphs have dimensions {a} and {b}; pair is trivially distinguished")]
    DimensionMismatch { a: usize, b: usize },
    #[error("flattened probability matrix has {entries} entries, exceeding limit {limit}")]
    FlattenedTooLarge { entries: usize, limit: usize },
    #[error("p_infinity mode is only defined for hardcore statistics")]
    PinfUnsupportedStats,
    #[error("localized hardcore mode needs the dense spectral path: dimension {dim} > threshold {threshold}")]
    LocalizedBeyondThreshold { dim: usize, threshold: usize },
    #[error(transparent)]
    Occupation(#[from] OccupationError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InputMode {
    Superposition,
    Localized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum PinfMode {
    /// Exact eigenspace-projector limiting distribution.
    Projector,
    /// Trapezoidal time average with a doubling-T error estimate.
    TimeAverage { t_max: f64, samples: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSpec {
    pub walk_k: usize,
    pub input: InputMode,
    pub stats: ParticleStatistics,
    pub theta_grid: Vec<f64>,
    pub pinf: Option<PinfMode>,
    /// Boson superposition input with flat amplitudes over the
    /// multiset basis instead of the default symmetrized product of
    /// single-particle uniform states.
    pub boson_multiset_basis: bool,
    pub dense_threshold: usize,
    pub basis_limit: usize,
    /// Guard on D^2 for localized mode.
    pub flattened_entry_limit: usize,
}

impl ExperimentSpec {
    pub fn new(walk_k: usize, input: InputMode, stats: ParticleStatistics) -> Self {
        ExperimentSpec {
            walk_k,
            input,
            stats,
            theta_grid: default_theta_grid(32),
            pinf: None,
            boson_multiset_basis: false,
            dense_threshold: evolve::DEFAULT_DENSE_THRESHOLD,
            basis_limit: DEFAULT_BASIS_LIMIT,
            flattened_entry_limit: 10_000_000,
        }
    }
}

/// Uniform grid of `points` values spanning (0.1, 2π).
pub fn default_theta_grid(points: usize) -> Vec<f64> {
    assert!(points >= 1);
    let start = 0.1;
    let end = 2.0 * std::f64::consts::PI;
    (0..points)
        .map(|i| start + (end - start) * (i + 1) as f64 / (points + 1) as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThetaDelta {
    pub theta: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PinfDelta {
    pub delta: f64,
    /// Convergence estimate (time-average mode only).
    pub error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaResult {
    pub per_theta: Vec<ThetaDelta>,
    pub pinf: Option<PinfDelta>,
    /// Probability-list lengths produced per graph.
    pub dims: (usize, usize),
    pub method: String,
}

impl DeltaResult {
    pub fn max_theta_delta(&self) -> f64 {
        self.per_theta.iter().map(|t| t.delta).fold(0.0, f64::max)
    }
}

/// Δ = Σ_i |sort(L1) - sort(L2)|.
pub fn delta(l1: &[f64], l2: &[f64]) -> Result<f64, ExperimentError> {
    if l1.len() != l2.len() {
        return Err(ExperimentError::LengthMismatch { a: l1.len(), b: l2.len() });
    }
    let mut a = l1.to_vec();
    let mut b = l2.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum())
}

/// Δ per θ (and optional Δ(p_∞)) for uniform-superposition inputs.
pub fn run_superposition(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    match spec.stats {
        ParticleStatistics::Hardcore => hardcore_superposition(g1, g2, spec),
        _ => free_particle_superposition(g1, g2, spec),
    }
}

fn hardcore_superposition(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    let og1 = build_occupation_graph_with_limit(g1, spec.walk_k, spec.basis_limit)?;
    let og2 = build_occupation_graph_with_limit(g2, spec.walk_k, spec.basis_limit)?;
    if og1.dim() != og2.dim() {
        return Err(ExperimentError::DimensionMismatch { a: og1.dim(), b: og2.dim() });
    }
    let dim = og1.dim();
    let psi = uniform_superposition(dim);
    let dense = dim <= spec.dense_threshold;
    let sds: Option<(SpectralDecomposition, SpectralDecomposition)> = dense.then(|| {
        (
            SpectralDecomposition::from_occupation(&og1),
            SpectralDecomposition::from_occupation(&og2),
        )
    });
    let mut per_theta = Vec::with_capacity(spec.theta_grid.len());
    for &theta in &spec.theta_grid {
        let (p1, p2) = if let Some((sd1, sd2)) = &sds {
            (
                probability_list(&sd1.evolve(&psi, theta)),
                probability_list(&sd2.evolve(&psi, theta)),
            )
        } else {
            (
                probability_list(&evolve_krylov(&og1, &psi, theta, KRYLOV_TOL)?),
                probability_list(&evolve_krylov(&og2, &psi, theta, KRYLOV_TOL)?),
            )
        };
        per_theta.push(ThetaDelta { theta, delta: delta(&p1, &p2)? });
    }
    let pinf = match spec.pinf {
        None => None,
        Some(mode) => {
            let (sd1, sd2) = sds.as_ref().ok_or(EvolveError::BeyondDenseThreshold {
                dim,
                threshold: spec.dense_threshold,
            })?;
            Some(pinf_delta_for_state(sd1, sd2, &psi, mode)?)
        }
    };
    Ok(DeltaResult {
        per_theta,
        pinf,
        dims: (dim, dim),
        method: if dense { "spectral".into() } else { "krylov".into() },
    })
}

fn pinf_delta_for_state(
    sd1: &SpectralDecomposition,
    sd2: &SpectralDecomposition,
    psi: &StateVector,
    mode: PinfMode,
) -> Result<PinfDelta, ExperimentError> {
    match mode {
        PinfMode::Projector => {
            let p1 = sd1.limiting_distribution(psi);
            let p2 = sd2.limiting_distribution(psi);
            Ok(PinfDelta { delta: delta(&p1, &p2)?, error: None })
        }
        PinfMode::TimeAverage { t_max, samples } => {
            let (p1, e1) = time_averaged_distribution(sd1, psi, t_max, samples);
            let (p2, e2) = time_averaged_distribution(sd2, psi, t_max, samples);
            Ok(PinfDelta { delta: delta(&p1, &p2)?, error: Some(e1 + e2) })
        }
    }
}

fn free_particle_superposition(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    if spec.pinf.is_some() {
        return Err(ExperimentError::PinfUnsupportedStats);
    }
    if g1.n() != g2.n() {
        return Err(ExperimentError::DimensionMismatch { a: g1.n(), b: g2.n() });
    }
    let n = g1.n();
    let k = spec.walk_k;
    let (basis, psi): (Vec<_>, Vec<Complex64>) = match spec.stats {
        // default boson input: each particle in the uniform
        // single-particle superposition, i.e. the symmetrized product
        // state u^(x)k with amplitude sqrt(k!/mult!) n^(-k/2) on each
        // multiset; the flag switches to flat multiset amplitudes
        ParticleStatistics::Boson if !spec.boson_multiset_basis => {
            let basis = multiset_configurations(n, k);
            let kfact: f64 = (1..=k).map(|i| i as f64).product();
            let scale = (n as f64).powi(k as i32);
            let psi = basis
                .iter()
                .map(|c| {
                    Complex64::new((kfact / c.multiplicity_factorial() / scale).sqrt(), 0.0)
                })
                .collect();
            (basis, psi)
        }
        ParticleStatistics::Boson => {
            let basis = multiset_configurations(n, k);
            let amp = Complex64::new(1.0 / (basis.len() as f64).sqrt(), 0.0);
            let psi = vec![amp; basis.len()];
            (basis, psi)
        }
        _ => {
            let basis = distinct_configurations(n, k);
            let amp = Complex64::new(1.0 / (basis.len() as f64).sqrt(), 0.0);
            let psi = vec![amp; basis.len()];
            (basis, psi)
        }
    };
    let mut per_theta = Vec::with_capacity(spec.theta_grid.len());
    let mut dims = (0, 0);
    for &theta in &spec.theta_grid {
        let u1 = single_particle_unitary(g1, theta);
        let u2 = single_particle_unitary(g2, theta);
        let p1 = output_distribution(&u1, &basis, &psi, spec.stats)?;
        let p2 = output_distribution(&u2, &basis, &psi, spec.stats)?;
        dims = (p1.len(), p2.len());
        per_theta.push(ThetaDelta { theta, delta: delta(&p1, &p2)? });
    }
    Ok(DeltaResult { per_theta, pinf: None, dims, method: "free-particle".into() })
}

/// Localized mode: the full start-to-target probability matrix,
/// flattened into one list of D·D' probabilities and sorted once.
pub fn run_localized(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    match spec.stats {
        ParticleStatistics::Hardcore => hardcore_localized(g1, g2, spec),
        _ => free_particle_localized(g1, g2, spec),
    }
}

fn hardcore_localized(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    let og1 = build_occupation_graph_with_limit(g1, spec.walk_k, spec.basis_limit)?;
    let og2 = build_occupation_graph_with_limit(g2, spec.walk_k, spec.basis_limit)?;
    if og1.dim() != og2.dim() {
        return Err(ExperimentError::DimensionMismatch { a: og1.dim(), b: og2.dim() });
    }
    let dim = og1.dim();
    let entries = dim * dim;
    if entries > spec.flattened_entry_limit {
        return Err(ExperimentError::FlattenedTooLarge {
            entries,
            limit: spec.flattened_entry_limit,
        });
    }
    if dim > spec.dense_threshold {
        return Err(ExperimentError::LocalizedBeyondThreshold {
            dim,
            threshold: spec.dense_threshold,
        });
    }
    let sd1 = SpectralDecomposition::from_occupation(&og1);
    let sd2 = SpectralDecomposition::from_occupation(&og2);
    let flat_probs = |sd: &SpectralDecomposition, theta: f64| -> Vec<f64> {
        let u = sd.propagator(theta);
        u.iter().map(|a| a.norm_sqr()).collect()
    };
    let per_theta: Vec<ThetaDelta> = spec
        .theta_grid
        .par_iter()
        .map(|&theta| {
            let p1 = flat_probs(&sd1, theta);
            let p2 = flat_probs(&sd2, theta);
            Ok(ThetaDelta { theta, delta: delta(&p1, &p2)? })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let pinf = match spec.pinf {
        None => None,
        Some(PinfMode::Projector) => {
            let m1: Vec<f64> = sd1.limiting_probability_matrix().iter().copied().collect();
            let m2: Vec<f64> = sd2.limiting_probability_matrix().iter().copied().collect();
            Some(PinfDelta { delta: delta(&m1, &m2)?, error: None })
        }
        Some(PinfMode::TimeAverage { t_max, samples }) => {
            let mut flat1 = Vec::with_capacity(entries);
            let mut flat2 = Vec::with_capacity(entries);
            let mut err = 0.0f64;
            for start in 0..dim {
                let psi1 = basis_state(dim, start);
                let (p1, e1) = time_averaged_distribution(&sd1, &psi1, t_max, samples);
                let (p2, e2) = time_averaged_distribution(&sd2, &psi1, t_max, samples);
                flat1.extend(p1);
                flat2.extend(p2);
                err = err.max(e1 + e2);
            }
            Some(PinfDelta { delta: delta(&flat1, &flat2)?, error: Some(err) })
        }
    };
    Ok(DeltaResult {
        per_theta,
        pinf,
        dims: (entries, entries),
        method: "spectral".into(),
    })
}

fn basis_state(dim: usize, index: usize) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[index] = Complex64::new(1.0, 0.0);
    StateVector::new(amps)
}

fn free_particle_localized(
    g1: &Graph,
    g2: &Graph,
    spec: &ExperimentSpec,
) -> Result<DeltaResult, ExperimentError> {
    if spec.pinf.is_some() {
        return Err(ExperimentError::PinfUnsupportedStats);
    }
    if g1.n() != g2.n() {
        return Err(ExperimentError::DimensionMismatch { a: g1.n(), b: g2.n() });
    }
    // starts restricted to distinct-site configurations so hardcore,
    // boson and fermion columns share a start set
    let starts = distinct_configurations(g1.n(), spec.walk_k);
    let targets = match spec.stats {
        ParticleStatistics::Boson => multiset_configurations(g1.n(), spec.walk_k),
        _ => starts.clone(),
    };
    let entries = starts.len() * targets.len();
    if entries > spec.flattened_entry_limit {
        return Err(ExperimentError::FlattenedTooLarge {
            entries,
            limit: spec.flattened_entry_limit,
        });
    }
    let flat = |g: &Graph, theta: f64| -> Result<Vec<f64>, ExperimentError> {
        let u = single_particle_unitary(g, theta);
        let rows: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|from| {
                targets
                    .iter()
                    .map(|to| {
                        transition_amplitude(&u, from, to, spec.stats)
                            .map(|a| a.norm_sqr())
                            .map_err(ExperimentError::from)
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(rows.into_iter().flatten().collect())
    };
    let mut per_theta = Vec::with_capacity(spec.theta_grid.len());
    for &theta in &spec.theta_grid {
        let p1 = flat(g1, theta)?;
        let p2 = flat(g2, theta)?;
        per_theta.push(ThetaDelta { theta, delta: delta(&p1, &p2)? });
    }
    Ok(DeltaResult {
        per_theta,
        pinf: None,
        dims: (entries, entries),
        method: "free-particle".into(),
    })
}

/// First hop count m at which the two occupation graphs differ, for
/// the superposition analog (sorted A^m·1) and the circuit analog
/// (sorted diag(A^m)). Exact integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MhopComparison {
    pub superposition_m: Option<usize>,
    pub circuit_m: Option<usize>,
}

pub fn run_mhop_comparison(
    g1: &Graph,
    g2: &Graph,
    walk_k: usize,
    m_max: usize,
) -> Result<MhopComparison, ExperimentError> {
    assert!(m_max >= 1);
    let og1 = build_occupation_graph_with_limit(g1, walk_k, DEFAULT_BASIS_LIMIT)?;
    let og2 = build_occupation_graph_with_limit(g2, walk_k, DEFAULT_BASIS_LIMIT)?;
    if og1.dim() != og2.dim() {
        return Err(ExperimentError::DimensionMismatch { a: og1.dim(), b: og2.dim() });
    }
    let dim = og1.dim();
    let one = BigUint::from(1u32);

    let mut superposition_m = None;
    let mut v1 = vec![one.clone(); dim];
    let mut v2 = vec![one.clone(); dim];
    for m in 1..=m_max {
        v1 = evolve::mhop_counts(&og1, 1, &v1);
        v2 = evolve::mhop_counts(&og2, 1, &v2);
        if !sorted_equal(&v1, &v2) {
            superposition_m = Some(m);
            break;
        }
    }

    // diag(A^m)_i = (A^m e_i)_i, tracked per start
    let mut circuit_m = None;
    let mut diags1 = vec![Vec::with_capacity(dim); m_max];
    let mut diags2 = vec![Vec::with_capacity(dim); m_max];
    for (og, diags) in [(&og1, &mut diags1), (&og2, &mut diags2)] {
        for i in 0..dim {
            let mut v = vec![BigUint::from(0u32); dim];
            v[i] = one.clone();
            for diag in diags.iter_mut() {
                v = evolve::mhop_counts(og, 1, &v);
                diag.push(v[i].clone());
            }
        }
    }
    for m in 0..m_max {
        if !sorted_equal(&diags1[m], &diags2[m]) {
            circuit_m = Some(m + 1);
            break;
        }
    }
    Ok(MhopComparison { superposition_m, circuit_m })
}

fn sorted_equal(a: &[BigUint], b: &[BigUint]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfi::build_morris_pair;

    #[test]
    fn delta_basics() {
        assert_eq!(delta(&[0.25; 4], &[0.25; 4]).unwrap(), 0.0);
        assert!((delta(&[0.5, 0.5], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(delta(&[0.2, 0.8], &[0.8, 0.2]).unwrap(), 0.0);
        assert!(matches!(
            delta(&[0.5], &[0.5, 0.5]),
            Err(ExperimentError::LengthMismatch { a: 1, b: 2 })
        ));
    }

    #[test]
    fn theta_grid_spans_open_interval() {
        let grid = default_theta_grid(32);
        assert_eq!(grid.len(), 32);
        assert!(grid[0] > 0.1);
        assert!(*grid.last().unwrap() < 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn permuted_copy_has_zero_delta() {
        let pair = build_morris_pair(2).unwrap();
        let perm: Vec<usize> = (0..12).map(|i| (i * 5 + 3) % 12).collect();
        let permuted = pair.p.permute(&perm).unwrap();
        let mut spec = ExperimentSpec::new(
            2,
            InputMode::Superposition,
            ParticleStatistics::Hardcore,
        );
        spec.theta_grid = default_theta_grid(4);
        spec.pinf = Some(PinfMode::Projector);
        let r = run_superposition(&pair.p, &permuted, &spec).unwrap();
        assert!(r.max_theta_delta() <= 1e-10);
        assert!(r.pinf.unwrap().delta <= 1e-10);
        spec.input = InputMode::Localized;
        spec.walk_k = 1;
        let r = run_localized(&pair.p, &permuted, &spec).unwrap();
        assert!(r.max_theta_delta() <= 1e-10);
        assert!(r.pinf.unwrap().delta <= 1e-10);
    }

    #[test]
    fn morris_k2_superposition_distinguishes() {
        let pair = build_morris_pair(2).unwrap();
        let mut spec = ExperimentSpec::new(
            2,
            InputMode::Superposition,
            ParticleStatistics::Hardcore,
        );
        spec.theta_grid = default_theta_grid(8);
        let r = run_superposition(&pair.p, &pair.q, &spec).unwrap();
        assert!(r.max_theta_delta() > 1e-6);
    }

    #[test]
    fn regular_superposition_no_go() {
        // hexagon vs two triangles: 1-QW superposition sees nothing,
        // localized circuit probabilities differ
        let hexagon = {
            let e: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
            Graph::from_edge_list(6, &e).unwrap()
        };
        let two_triangles =
            Graph::from_edge_list(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let mut spec =
            ExperimentSpec::new(1, InputMode::Superposition, ParticleStatistics::Hardcore);
        spec.theta_grid = default_theta_grid(8);
        let r = run_superposition(&hexagon, &two_triangles, &spec).unwrap();
        assert!(r.max_theta_delta() <= 1e-10);
        spec.input = InputMode::Localized;
        let r = run_localized(&hexagon, &two_triangles, &spec).unwrap();
        assert!(r.max_theta_delta() > 1e-6);
    }

    #[test]
    fn mhop_morris_k2() {
        let pair = build_morris_pair(2).unwrap();
        // 1-QW circuit diagonal distinguishes by m = 6
        let r = run_mhop_comparison(&pair.p, &pair.q, 1, 8).unwrap();
        assert!(r.circuit_m.unwrap() <= 6);
        // 2-QW superposition analog distinguishes by m = 4
        let r = run_mhop_comparison(&pair.p, &pair.q, 2, 8).unwrap();
        assert!(r.superposition_m.unwrap() <= 4);
    }

    #[test]
    fn mhop_isomorphic_pair_never_differs() {
        let pair = build_morris_pair(2).unwrap();
        let perm: Vec<usize> = (0..12).rev().collect();
        let permuted = pair.p.permute(&perm).unwrap();
        let r = run_mhop_comparison(&pair.p, &permuted, 2, 6).unwrap();
        assert_eq!(r, MhopComparison { superposition_m: None, circuit_m: None });
    }

    #[test]
    fn localized_guards() {
        let pair = build_morris_pair(2).unwrap();
        let mut spec =
            ExperimentSpec::new(2, InputMode::Localized, ParticleStatistics::Hardcore);
        spec.flattened_entry_limit = 100;
        assert!(matches!(
            run_localized(&pair.p, &pair.q, &spec),
            Err(ExperimentError::FlattenedTooLarge { entries: 4356, limit: 100 })
        ));
        let mut spec =
            ExperimentSpec::new(2, InputMode::Localized, ParticleStatistics::Hardcore);
        spec.dense_threshold = 10;
        assert!(matches!(
            run_localized(&pair.p, &pair.q, &spec),
            Err(ExperimentError::LocalizedBeyondThreshold { dim: 66, threshold: 10 })
        ));
    }

    #[test]
    fn pinf_rejected_for_free_particles() {
        let pair = build_morris_pair(1).unwrap();
        let mut spec =
            ExperimentSpec::new(1, InputMode::Superposition, ParticleStatistics::Boson);
        spec.pinf = Some(PinfMode::Projector);
        assert!(matches!(
            run_superposition(&pair.p, &pair.q, &spec),
            Err(ExperimentError::PinfUnsupportedStats)
        ));
    }
}
