//! Microbenchmarks for the heavy paths: join evaluation, maximum matching,
//! the rational simplex, codebook scans, and dependent rounding.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use joincover::codes::{min_distance, rs_codebook};
use joincover::graphs::{maximum_matching, Graph};
use joincover::lpbounds::{agm_bound, lp_lb, Hypergraph};
use joincover::rational::ratio;
use joincover::relation::{generic_join, naive_join, Domain, QueryInstance, Relation};
use joincover::rounding::dependent_round;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn cycle_instance(n: usize, domain: u64, keep_percent: u64) -> QueryInstance {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let domains: Vec<Domain> = (0..n).map(|_| Domain::integers(domain)).collect();
    let mut edges = Vec::new();
    let mut relations = Vec::new();
    for i in 0..n {
        let e = if i + 1 < n { vec![i, i + 1] } else { vec![0, n - 1] };
        let mut rows = Vec::new();
        for a in 0..domain as u32 {
            for b in 0..domain as u32 {
                if rng.next_u64() % 100 < keep_percent {
                    rows.push(vec![a, b]);
                }
            }
        }
        relations.push(Relation::new(e.clone(), rows).unwrap());
        edges.push(e);
    }
    QueryInstance::new(n, domains, edges, relations, None).unwrap()
}

fn bench_joins(c: &mut Criterion) {
    let q = cycle_instance(5, 8, 45);
    let order: Vec<usize> = (0..5).collect();
    c.bench_function("naive_join/cycle5", |b| b.iter(|| naive_join(black_box(&q))));
    c.bench_function("generic_join/cycle5", |b| {
        b.iter(|| generic_join(black_box(&q), black_box(&order)).unwrap())
    });
}

fn bench_matching(c: &mut Criterion) {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let n = 24;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_u64() % 100 < 20 {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::new(n, edges).unwrap();
    c.bench_function("maximum_matching/n24", |b| {
        b.iter(|| maximum_matching(black_box(&g)))
    });
}

fn bench_lp(c: &mut Criterion) {
    let h = Hypergraph::new(8, (0..8).map(|i| vec![i, (i + 1) % 8]).collect()).unwrap();
    let all = (0..8).collect();
    c.bench_function("agm_bound/cycle8", |b| {
        b.iter(|| agm_bound(black_box(&h), black_box(&all)).unwrap())
    });
    c.bench_function("lp_lb/cycle8_s5", |b| {
        b.iter(|| lp_lb(black_box(&h), black_box(5)).unwrap())
    });
}

fn bench_codes(c: &mut Criterion) {
    c.bench_function("rs_codebook/q11_n7_d5", |b| {
        b.iter(|| rs_codebook(black_box(11), 7, 5, None).unwrap())
    });
    let code = rs_codebook(7, 6, 4, None).unwrap();
    c.bench_function("min_distance/343x6", |b| {
        b.iter(|| min_distance(black_box(&code)).unwrap())
    });
}

fn bench_rounding(c: &mut Criterion) {
    let x: Vec<_> = (0..64).map(|i| ratio(1 + (i % 7), 8)).collect();
    c.bench_function("dependent_round/64", |b| {
        b.iter(|| {
            let mut rng = ChaCha12Rng::seed_from_u64(11);
            dependent_round(black_box(&x), &mut rng).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_joins,
    bench_matching,
    bench_lp,
    bench_codes,
    bench_rounding
);
criterion_main!(benches);
