//! Multi-particle quantum-walk graph distinguishers.
//!
//! Hardcore-boson (XY) walks on the k-particle occupation graph,
//! free boson/fermion walks via permanents/determinants, classical
//! Weisfeiler-Leman reference tests, and the CFI / strongly-regular
//! graph families that separate them.

pub mod cfi;
pub mod evolve;
pub mod experiments;
pub mod graph;
pub mod occupation;
pub mod srg;
pub mod stats;
pub mod wl;

pub use cfi::{build_cai_pair, build_morris_pair, CfiPair};
pub use evolve::{SpectralDecomposition, StateVector};
pub use experiments::{
    delta, run_localized, run_mhop_comparison, run_superposition, DeltaResult, ExperimentSpec,
    InputMode, PinfMode,
};
pub use graph::{are_isomorphic, Graph, NodeLabel};
pub use occupation::{build_occupation_graph, OccupationBasis, OccupationGraph};
pub use srg::{rooks_4x4, shrikhande, srg_params, SrgParams};
pub use stats::ParticleStatistics;
pub use wl::{color_refinement, compare as wl_compare, k_wl, WlComparison};
