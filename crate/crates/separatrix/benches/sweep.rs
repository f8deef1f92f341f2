//! Parallel against sequential parameter sweeps. On a single core the two
//! should match; the gap measures the pool overhead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use separatrix::hamiltonian::{PolyHamiltonian, CUBIC_MODEL};
use separatrix::manifolds::{equilibrium, split, ManifoldConfig};
use separatrix::numeric::{Dd, Real};
use separatrix::ode::IntegratorConfig;
use separatrix::sweep;

fn mu_grid(n: usize) -> Vec<Dd> {
    (0..n).map(|k| Dd::from_f64(0.002 + 0.001 * k as f64)).collect()
}

fn equilibria(c: &mut Criterion) {
    let h = PolyHamiltonian::parse(CUBIC_MODEL).unwrap();
    let nu = Dd::from_f64(0.01);
    let mut group = c.benchmark_group("equilibrium_sweep");
    let grid = mu_grid(64);
    group.bench_function(BenchmarkId::new("parallel", grid.len()), |b| {
        b.iter(|| sweep::map(grid.clone(), |mu| equilibrium(&h, mu, nu).map(|e| e.lambda).ok()))
    });
    group.bench_function(BenchmarkId::new("sequential", grid.len()), |b| {
        b.iter(|| sweep::map_sequential(grid.clone(), |mu| equilibrium(&h, mu, nu).map(|e| e.lambda).ok()))
    });
    group.finish();
}

fn splittings(c: &mut Criterion) {
    let h = PolyHamiltonian::parse(CUBIC_MODEL).unwrap();
    let nu = Dd::from_f64(0.01);
    let cfg = ManifoldConfig::with_integrator(IntegratorConfig { precision_bits: 106, ..IntegratorConfig::with_tol(1e-20) });
    let grid = mu_grid(4).into_iter().map(|mu| mu + Dd::from_f64(0.01)).collect::<Vec<_>>();
    let mut group = c.benchmark_group("split_sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", grid.len()), |b| {
        b.iter(|| sweep::map(grid.clone(), |mu| split(&h, black_box(mu), nu, &cfg).map(|r| r.measurement.e_e1).ok()))
    });
    group.bench_function(BenchmarkId::new("sequential", grid.len()), |b| {
        b.iter(|| {
            sweep::map_sequential(grid.clone(), |mu| split(&h, black_box(mu), nu, &cfg).map(|r| r.measurement.e_e1).ok())
        })
    });
    group.finish();
}

criterion_group!(benches, equilibria, splittings);
criterion_main!(benches);
