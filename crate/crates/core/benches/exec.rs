use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kecollapse_core::ma::{solve_real_ma_with, standard_domain, SolveOptions};
use kecollapse_core::semiflat::{gh_discrepancy_with, random_pairs, SemiflatMetric};
use kecollapse_core::tropical::{amoeba_sample_with, AmoebaSampling, Region, TropicalPolynomial};
use kecollapse_core::Exec;

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn ma_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("ma_solve_2d");
    g.sample_size(10);
    for res in [32, 64] {
        for (name, exec) in POLICIES {
            let opts = SolveOptions {
                exec,
                ..SolveOptions::default()
            };
            g.bench_with_input(BenchmarkId::new(name, res), &res, |b, &res| {
                b.iter(|| solve_real_ma_with(standard_domain(2).unwrap(), 1.0, res, &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn gh(c: &mut Criterion) {
    let opts = SolveOptions::default();
    let sol = solve_real_ma_with(standard_domain(2).unwrap(), 1.0, 48, &opts).unwrap();
    let m = SemiflatMetric::from_neg_log_t(&sol, 10.0).unwrap();
    let pairs = random_pairs(2, 16, 0, 0.05);
    let mut g = c.benchmark_group("gh_discrepancy");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| {
            b.iter(|| gh_discrepancy_with(&m, black_box(&pairs), exec).unwrap())
        });
    }
    g.finish();
}

fn amoeba(c: &mut Criterion) {
    let p = TropicalPolynomial::from_real(&[
        (&[0, 0], 1.0, 0),
        (&[1, 0], 1.0, 0),
        (&[0, 1], 1.0, 0),
        (&[1, 1], -2.0, 1),
    ])
    .unwrap();
    let sampling = AmoebaSampling::new(Region::cube(2, 2.0).unwrap(), 100, 16).unwrap();
    let mut g = c.benchmark_group("amoeba");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| {
            b.iter(|| amoeba_sample_with(&p, black_box(1e-6), &sampling, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, ma_solve, gh, amoeba);
criterion_main!(benches);
