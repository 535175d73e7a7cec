use bilfwi_core::{build_grid, factorize, Frequency, Model, SolveCounter};
use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

fn bench_factorize(c: &mut Criterion) {
    let grid = build_grid(64, 48, 1.6, 1.2).unwrap();
    let m = Model::constant(&grid, 0.25);
    c.bench_function("helmholtz_factorize_64x48", |b| {
        b.iter(|| {
            factorize(&grid, &m, Frequency::from_hz(1.5), SolveCounter::new()).unwrap()
        })
    });
}

fn bench_solve(c: &mut Criterion) {
    let grid = build_grid(64, 48, 1.6, 1.2).unwrap();
    let m = Model::constant(&grid, 0.25);
    let fact = factorize(&grid, &m, Frequency::from_hz(1.5), SolveCounter::new()).unwrap();
    let rhs: Vec<Complex64> = (0..grid.num_nodes())
        .map(|k| Complex64::new((k % 7) as f64, (k % 3) as f64))
        .collect();
    c.bench_function("helmholtz_solve_64x48", |b| {
        b.iter(|| {
            bilfwi_core::helmholtz::solve_forward_load(
                &fact,
                &rhs,
                bilfwi_core::SolvePhase::Other,
            )
        })
    });
}

criterion_group!(benches, bench_factorize, bench_solve);
criterion_main!(benches);
