use std::sync::Arc;

use brstkit_bench::{constraints, ideal, ANGULAR_MOMENTUM, SL2_PAIR, SO3};
use brstkit_core::brst::{build_generator, build_generator_adaptive};
use brstkit_core::cohomology::{fit_resolution, BrstComplex, CohomologyWindow};
use brstkit_core::homotopy::{build_homotopy, PivotOrder};
use brstkit_core::ideal::groebner_basis;
use brstkit_core::koszul_tate::{build_resolution, ResolutionWindow};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SYSTEMS: [(&str, usize, &[&str]); 3] =
    [("angular_momentum", 2, ANGULAR_MOMENTUM), ("so3", 3, SO3), ("sl2_pair", 2, SL2_PAIR)];

fn groebner(c: &mut Criterion) {
    let mut g = c.benchmark_group("groebner");
    for (name, n, gens) in SYSTEMS {
        let (table, polys) = constraints(n, gens);
        g.bench_function(name, |b| b.iter(|| groebner_basis(&table, &polys).unwrap()));
    }
    g.finish();
}

fn resolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("resolution");
    g.sample_size(10);
    let i = ideal(3, SO3);
    for weight in [2, 3, 4] {
        let w = ResolutionWindow { max_weight: weight, depth: 3 };
        g.bench_with_input(BenchmarkId::new("so3", weight), &w, |b, &w| b.iter(|| build_resolution(&i, w).unwrap()));
    }
    g.finish();
}

fn generator(c: &mut Criterion) {
    let mut g = c.benchmark_group("brst_generator");
    g.sample_size(10);
    for (name, n, gens) in SYSTEMS {
        let i = ideal(n, gens);
        let res = Arc::new(build_resolution(&i, ResolutionWindow { max_weight: 2, depth: 3 }).unwrap());
        g.bench_function(name, |b| {
            b.iter(|| {
                let s = build_homotopy(res.clone(), PivotOrder::Forward);
                build_generator(&res, &s, 4).unwrap()
            })
        });
    }
    g.finish();
}

fn cohomology(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohomology");
    g.sample_size(10);
    let w = CohomologyWindow { max_weight: 2, ghost_cap: 2 };
    for (name, n, gens) in SYSTEMS {
        let i = ideal(n, gens);
        let res = fit_resolution(&i, ResolutionWindow { max_weight: 2, depth: 3 }, w).unwrap();
        let built = build_generator_adaptive(&i, res.window(), PivotOrder::Forward, 8, w.ghost_cap + 3, 4).unwrap();
        g.bench_function(name, |b| {
            b.iter(|| {
                let x = BrstComplex::new(&built.resolution, &built.state, w);
                (-1..=1)
                    .flat_map(|t| (0..=w.max_weight).map(move |d| (t, d)))
                    .map(|(t, d)| x.cohomology_slice(t, d).unwrap().dimension)
                    .sum::<usize>()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, groebner, resolution, generator, cohomology);
criterion_main!(benches);
