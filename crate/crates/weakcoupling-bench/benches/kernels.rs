use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C64;
use weakcoupling::birman_schwinger::{BoxGrid, BsContext, Part, ResolventModel};
use weakcoupling::harmonic::unit_sphere_ft;
use weakcoupling::quadrature::build_sphere_quadrature;
use weakcoupling::vs_operator::assemble_vs;
use weakcoupling::{KineticSymbol, Potential};

fn sphere_transform(c: &mut Criterion) {
    c.bench_function("unit_sphere_ft d=2 r in [0.1,50]", |b| {
        b.iter(|| (0..1000).map(|i| unit_sphere_ft(2, black_box(0.1 + 0.05 * i as f64))).sum::<f64>())
    });
}

fn vs_assembly(c: &mut Criterion) {
    let s = KineticSymbol::bcs(3, 0.4).unwrap();
    let v = Potential::gaussian(3, 1.0);
    let q = build_sphere_quadrature(3, 16).unwrap();
    c.bench_function("assemble_vs d=3 order 16", |b| b.iter(|| assemble_vs(&v, &q, &s).unwrap()));
}

fn bs_apply(c: &mut Criterion) {
    let s = KineticSymbol::bcs(2, 0.4).unwrap();
    let v = Potential::gaussian(2, 1.0);
    let mut group = c.benchmark_group("bs apply d=2 L=24");
    for (n, model) in [(256, ResolventModel::Lattice), (256, ResolventModel::ContinuumLow)] {
        let grid = BoxGrid::new(2, 24.0, n).unwrap();
        let ctx = BsContext::new(&v, &s, &grid, model).unwrap();
        let op = ctx.operator(1e-4, Part::Full).unwrap();
        let x: Vec<C64> = (0..op.dim()).map(|i| C64::new((i as f64).sin(), 0.0)).collect();
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        group.bench_function(format!("N={n} {model:?}"), |b| b.iter(|| op.apply(black_box(&x), &mut y)));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = sphere_transform, vs_assembly, bs_apply
}
criterion_main!(benches);
