use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hhl_core::exec::Exec;
use hhl_core::families::{generate, Family, FamilySpec};
use hhl_core::hamiltonian::{MethodConfig, TrotterOrder};
use hhl_core::linalg::ComplexMatrix;
use hhl_core::pipeline::{run_hhl_with, HhlConfig};
use hhl_core::statevector::{gates, StateVector};
use num_complex::Complex64;
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn spread_state(n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    s.normalize().unwrap();
    s
}

fn gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("controlled_gate");
    let h = gates::h();
    for n in [14usize, 18, 20] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                let mut state = spread_state(n);
                b.iter(|| {
                    state
                        .apply_unitary_with(exec, black_box(&h), &[n / 2], &[n - 1])
                        .unwrap()
                });
            });
        }
    }
    group.finish();
}

fn matrix_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("matmul");
    group.sample_size(20);
    for dim in [64usize, 128, 256] {
        let a = ComplexMatrix::from_fn(dim, |i, j| {
            Complex64::new((i * j) as f64 % 7.0, (i + j) as f64 % 3.0)
        });
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, dim), &a, |b, a| {
                b.iter(|| black_box(a.matmul_with(a, exec)));
            });
        }
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("hhl_tridiagonal_trotter");
    group.sample_size(10);
    let config = HhlConfig::with_method(MethodConfig::Trotter {
        steps: 4,
        order: TrotterOrder::Second,
    });
    for dim in [16usize, 64] {
        let problem = generate(&FamilySpec::new(Family::Tridiagonal, dim, 0)).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, dim), &problem, |b, p| {
                b.iter(|| run_hhl_with(p, &config, exec).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, gate_application, matrix_product, end_to_end);
criterion_main!(benches);
