use std::hint::black_box;

use covpom::abelian::torus::{canonical_family, equal_arcs, phase_pom};
use covpom::abelian::{build_covariant_pom, DiagonalRep, FiniteAbelianGroup, IsometryFamily, SigmaSpace, Subgroup};
use covpom::check_pom_axioms;
use covpom::phasespace::finite_weyl_pom;
use covpom_bench::{random_density_matrix, rng};
use criterion::{criterion_group, criterion_main, Criterion};

fn phase(c: &mut Criterion) {
    let h = canonical_family(8);
    let edges = equal_arcs(16);
    c.bench_function("phase_pom d=8, 16 arcs", |b| b.iter(|| phase_pom(black_box(&h), black_box(&edges)).unwrap()));
    let pom = phase_pom(&h, &edges).unwrap();
    c.bench_function("check_pom_axioms phase d=8", |b| b.iter(|| check_pom_axioms(black_box(&pom), 1e-10).unwrap()));
}

fn covariant(c: &mut Criterion) {
    let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
    let h = Subgroup::generated(&g, &[2]).unwrap();
    let rep = DiagonalRep::uniform(g, 2).unwrap();
    let w = IsometryFamily::random(&rep, 3, &mut rng(1)).unwrap();
    c.bench_function("build_covariant_pom Z2xZ4", |b| b.iter(|| build_covariant_pom(&rep, black_box(&h), &w).unwrap()));

    let z6 = FiniteAbelianGroup::cyclic(6).unwrap();
    let s = SigmaSpace::with_unit_nu(&z6, &Subgroup::generated(&z6, &[3]).unwrap()).unwrap();
    c.bench_function("sigma unitarity Z6/{0,3}", |b| b.iter(|| black_box(&s).unitarity_defect().unwrap()));
}

fn finite_weyl(c: &mut Criterion) {
    let t = random_density_matrix(&mut rng(2), 5);
    c.bench_function("finite_weyl_pom d=5", |b| b.iter(|| finite_weyl_pom(5, black_box(&t)).unwrap()));
}

criterion_group!(benches, phase, covariant, finite_weyl);
criterion_main!(benches);
