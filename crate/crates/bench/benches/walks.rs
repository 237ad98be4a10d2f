use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mpqw_core::cfi::build_morris_pair;
use mpqw_core::evolve::SpectralDecomposition;
use mpqw_core::evolve::{evolve_krylov, uniform_superposition, KRYLOV_TOL};
use mpqw_core::occupation::build_occupation_graph;
use mpqw_core::srg::{rooks_4x4, shrikhande};
use mpqw_core::stats::{single_particle_unitary, transition_amplitude, ParticleStatistics};
use mpqw_core::wl::compare;

fn bench_occupation_build(c: &mut Criterion) {
    let g = build_morris_pair(3).unwrap().p;
    c.bench_function("occupation_build_morris3_k2", |b| {
        b.iter(|| build_occupation_graph(black_box(&g), 2).unwrap())
    });
}

fn bench_spectral_evolve(c: &mut Criterion) {
    let g = build_morris_pair(2).unwrap().p;
    let og = build_occupation_graph(&g, 2).unwrap();
    let sd = SpectralDecomposition::from_occupation(&og);
    let psi = uniform_superposition(og.dim());
    c.bench_function("spectral_evolve_morris2_k2", |b| {
        b.iter(|| sd.evolve(black_box(&psi), 1.3))
    });
    c.bench_function("krylov_evolve_morris2_k2", |b| {
        b.iter(|| evolve_krylov(black_box(&og), &psi, 1.3, KRYLOV_TOL).unwrap())
    });
}

fn bench_wl(c: &mut Criterion) {
    let pair = build_morris_pair(2).unwrap();
    c.bench_function("wl1_morris2", |b| {
        b.iter(|| compare(black_box(&pair.p), &pair.q, 1).unwrap())
    });
    let (r, s) = (rooks_4x4(), shrikhande());
    c.bench_function("wl2_srg16", |b| {
        b.iter(|| compare(black_box(&r), &s, 2).unwrap())
    });
}

fn bench_permanent(c: &mut Criterion) {
    let g = rooks_4x4();
    let u = single_particle_unitary(&g, 0.7);
    let from = mpqw_core::stats::Configuration::new(vec![0, 5, 10, 15]);
    let to = mpqw_core::stats::Configuration::new(vec![1, 4, 11, 14]);
    c.bench_function("boson_amplitude_k4", |b| {
        b.iter(|| {
            transition_amplitude(black_box(&u), &from, &to, ParticleStatistics::Boson).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_occupation_build,
    bench_spectral_evolve,
    bench_wl,
    bench_permanent
);
criterion_main!(benches);
