use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ekrlab::affine::Agl;
use ekrlab::dgraph::{class_matrix, dense_adjacency, enumerate_maximum, DerangementGraph, SearchOptions};
use ekrlab::dmatrix::{build_m, kernel_vectors, random_primes, rank_mod_p_with, verify_kernel_with};
use ekrlab::{Exec, GroupTable};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn class_algebra(c: &mut Criterion) {
    let agl = Agl::build(4).unwrap();
    let gr = DerangementGraph::build(agl.group());
    let mut group = c.benchmark_group("class_matrix_agl4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(class_matrix(&gr, exec))));
    }
    group.finish();
}

fn dense(c: &mut Criterion) {
    let agl = Agl::build(3).unwrap();
    let gr = DerangementGraph::build(agl.group());
    let mut group = c.benchmark_group("dense_adjacency_agl3");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(dense_adjacency(&gr, exec))));
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let p = random_primes(1, 7)[0];
    let mut group = c.benchmark_group("rank_mod_p");
    group.sample_size(10);
    for n in [3, 4] {
        let agl = Agl::build(n).unwrap();
        let m = build_m(agl.group());
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                b.iter(|| black_box(rank_mod_p_with(m, p, None, exec)))
            });
        }
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let agl = Agl::build(4).unwrap();
    let m = build_m(agl.group());
    let vecs = kernel_vectors(16);
    let mut group = c.benchmark_group("verify_kernel_agl4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(verify_kernel_with(&m, &vecs, exec))));
    }
    group.finish();
}

fn cliques(c: &mut Criterion) {
    let g = GroupTable::symmetric(5).unwrap();
    let gr = DerangementGraph::build(&g);
    let mut group = c.benchmark_group("enumerate_maximum_sym5");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SearchOptions {
            exec,
            ..SearchOptions::default()
        };
        group.bench_function(name, |b| b.iter(|| black_box(enumerate_maximum(&gr, opts).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, class_algebra, dense, rank, kernel, cliques);
criterion_main!(benches);
