use std::hint::black_box;

use covpom::grid::GridState;
use covpom::phasespace::{
    gaussian, margins_of_gt, phase_space_density, phase_space_effect, CellGrid, EffectOptions, PhaseSpaceCell,
};
use covpom::posmom::{distribution, resolution_limit, uncertainty_product, SmearedObservable};
use covpom::Grid1D;
use covpom_bench::{fine_gaussian, production_grid, random_grid_state};
use criterion::{criterion_group, criterion_main, Criterion};

fn margins(c: &mut Criterion) {
    let t = random_grid_state(3, production_grid());
    c.bench_function("margins_of_gt n=4096 rank<=3", |b| b.iter(|| margins_of_gt(black_box(&t)).unwrap()));
    let (rho, nu) = margins_of_gt(&t).unwrap();
    let s = random_grid_state(4, production_grid());
    c.bench_function("uncertainty_product n=4096", |b| b.iter(|| uncertainty_product(black_box(&s), &rho, &nu).unwrap()));
}

fn resolution(c: &mut Criterion) {
    let rho = fine_gaussian();
    c.bench_function("resolution_limit 12001-cell Gaussian", |b| b.iter(|| resolution_limit(black_box(&rho))));
}

fn smeared(c: &mut Criterion) {
    let g = production_grid();
    let psi = gaussian(g, 0.5, 0.0);
    let (rho, _) = margins_of_gt(&GridState::pure(psi.clone()).unwrap()).unwrap();
    let obs = SmearedObservable::position(rho, g);
    let cells: Vec<(f64, f64)> = (0..40).map(|i| (-10.0 + 0.5 * i as f64, -9.5 + 0.5 * i as f64)).collect();
    c.bench_function("distribution n=4096, 40 cells", |b| b.iter(|| distribution(black_box(&psi), &obs, &cells).unwrap()));
}

fn phase_space(c: &mut Criterion) {
    let g = Grid1D::symmetric(512, 20.0).unwrap();
    let t = GridState::pure(gaussian(g, 1.0, 1.0)).unwrap();
    let s = GridState::pure(gaussian(g, 0.5, 0.0)).unwrap();
    let mut group = c.benchmark_group("phase space n=512");
    group.sample_size(10);
    group.bench_function("density stride 4", |b| b.iter(|| phase_space_density(black_box(&t), &s, &CellGrid::full(4)).unwrap()));
    let cell = PhaseSpaceCell::square(2.0).unwrap();
    group.bench_function("effect [-2,2]^2", |b| {
        b.iter(|| phase_space_effect(black_box(&t), &cell, &EffectOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, margins, resolution, smeared, phase_space);
criterion_main!(benches);
