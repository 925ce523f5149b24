use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cliffscape::circuit::{build_brickwork, SplitPoint};
use cliffscape::eval::variance::{variance_scan, ScanSpec};
use cliffscape::eval::{mean_over_clifford, SampleMode, Vqa};
use cliffscape::landscape::{find_pauli_minimum, stage_budget};
use cliffscape::par::with_threads;
use cliffscape::pauli::{enumerate_family, FamilyKind, SymplecticBasis};
use cliffscape::{CliffordPoint, Observable, StabilizerState};

/// `0` selects the default pool, `1` runs on the calling thread only.
const POOLS: [(usize, &str); 2] = [(1, "sequential"), (0, "parallel")];

fn scan(c: &mut Criterion) {
    let n = 6;
    let circuit = build_brickwork(n, 30).unwrap();
    let state = StabilizerState::zero(n);
    let family = enumerate_family(FamilyKind::Weight2Nn, n).unwrap();
    let spec = ScanSpec { circuit: &circuit, state: &state, family: &family, samples: 200, seed: 1, statevector_cap: 12 };
    let mut g = c.benchmark_group("variance_scan_clifford");
    for (threads, name) in POOLS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_threads(threads, || variance_scan(&spec, SampleMode::Clifford).unwrap()))
        });
    }
    g.finish();
}

fn exact_mean(c: &mut Criterion) {
    let circuit = build_brickwork(3, 2).unwrap();
    let state = StabilizerState::zero(3);
    let obs = Observable::single("+ZZI".parse().unwrap()).unwrap();
    let vqa = Vqa::new(&circuit, &obs, &state).unwrap();
    let mut g = c.benchmark_group("exact_clifford_mean_m8");
    for (threads, name) in POOLS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_threads(threads, || mean_over_clifford(&vqa, 8).unwrap()))
        });
    }
    g.finish();
}

fn greedy_stage(c: &mut Criterion) {
    let n = 6;
    let circuit = build_brickwork(n, 50).unwrap();
    let state = StabilizerState::zero(n);
    let family = enumerate_family(FamilyKind::Weight2All, n).unwrap();
    let split = SplitPoint::all_free(CliffordPoint::zeros(circuit.num_params()));
    let basis = SymplecticBasis::new(n);
    let samples = stage_budget(n, family.len());
    let mut g = c.benchmark_group("greedy_first_stage");
    for (threads, name) in POOLS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_threads(threads, || find_pauli_minimum(&circuit, &state, &family, &basis, &split, samples, 3)))
        });
    }
    g.finish();
}

criterion_group!(benches, scan, exact_mean, greedy_stage);
criterion_main!(benches);
