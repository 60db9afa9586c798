use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pastwalk_core::bound::{solve_feasibility, update, BoundParams, BoundSet};
use pastwalk_core::constants::{compute_b, compute_c0, TransformParams};
use pastwalk_core::mc::simulate;
use pastwalk_core::poly::{rat, Polynomial, TermPoly};
use pastwalk_core::special::phi;
use pastwalk_core::walk::{moments, WalkSpec};

fn linear_instance(g: usize) -> (BoundSet, BoundParams) {
    let params = BoundParams {
        epsilon: 0.11286862346080692,
        d: 0.410143812649425,
        c0: 1e-8,
        c1: 1.0,
        delta1: 1e-5,
        b_const: compute_b(0.11286862346080692, 0.410143812649425, 1.0).unwrap(),
    };
    let a: Vec<f64> = (0..g).map(|i| 4.986 * i as f64 / (g - 1) as f64).collect();
    let b: Vec<f64> = a.iter().map(|&x| (phi(x) - params.c0).min(0.999)).collect();
    let set = BoundSet {
        a,
        b,
        c: vec![6.497321214442595],
    };
    (set, params)
}

fn bench_phi(c: &mut Criterion) {
    c.bench_function("phi", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..100 {
                acc += phi(black_box(-5.0 + 0.1 * i as f64));
            }
            acc
        })
    });
}

fn bench_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("bound_update");
    for g in [50usize, 200] {
        let (set, params) = linear_instance(g);
        group.bench_with_input(BenchmarkId::from_parameter(g), &g, |b, _| {
            b.iter(|| update(black_box(&set), black_box(&params)))
        });
    }
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let (set, params) = linear_instance(192);
    c.bench_function("solve_feasibility_192", |b| {
        b.iter(|| solve_feasibility(black_box(&params), &set.a, &set.c))
    });
}

fn bench_constants(c: &mut Criterion) {
    let tp = |coef: &[i64]| TermPoly::from_polynomial(&Polynomial::from_ints(coef));
    let w = moments(&WalkSpec::new(tp(&[3, -1]), tp(&[5, 1]), rat(1, 2), rat(1, 1)).unwrap())
        .unwrap();
    let t = TransformParams::new(10_000, 1.5, 1.0, 0.1);
    c.bench_function("compute_c0", |b| {
        b.iter(|| compute_c0(black_box(&w), black_box(&t)).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let tp = |coef: &[i64]| TermPoly::from_polynomial(&Polynomial::from_ints(coef));
    let w = WalkSpec::new(tp(&[0, 1]), tp(&[0, -1]), rat(1, 2), rat(100, 1)).unwrap();
    c.bench_function("simulate_10k_paths", |b| {
        b.iter(|| simulate(black_box(&w), 10_000, 1_000_000, 7))
    });
}

criterion_group!(
    benches,
    bench_phi,
    bench_update,
    bench_solver,
    bench_constants,
    bench_simulate
);
criterion_main!(benches);
