use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use verbsense::corpus_space::{build_vocabulary, count_cooccurrences, reduce_svd};
use verbsense::eval::rank_of_correct;
use verbsense::experiment::{build_spaces, Inputs};
use verbsense::regression::{closed_form, train_gd};
use verbsense::sense::hac_cluster;
use verbsense::{ClusterConfig, PipelineConfig, RegressionConfig};
use verbsense_bench::{gaussian_matrix, gaussian_points, regression_problem, synthetic};

fn spaces(c: &mut Criterion) {
    let data = synthetic(0);
    let cfg = PipelineConfig::for_synthetic(&data.truth.spec);
    let inputs = Inputs::from(&data);
    let vocab = build_vocabulary(&data.corpus, &data.stoplist, &cfg.space).unwrap();
    c.bench_function("count_cooccurrences", |b| {
        b.iter(|| count_cooccurrences(black_box(&data.corpus), &vocab, cfg.space.window))
    });
    let mut group = c.benchmark_group("build_spaces");
    group.sample_size(10);
    group.bench_function("synthetic", |b| {
        b.iter(|| build_spaces(black_box(&inputs), &cfg).unwrap())
    });
    group.finish();
}

fn svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce_svd");
    for (rows, cols, k) in [(200, 100, 40), (500, 300, 100)] {
        let x = gaussian_matrix(rows, cols, 7);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{rows}x{cols}->{k}")),
            &x,
            |b, x| b.iter(|| reduce_svd(x, k).unwrap()),
        );
    }
    group.finish();
}

fn regression(c: &mut Criterion) {
    let ts = regression_problem(40, 40, 40, 3);
    let cfg = RegressionConfig::default();
    let mut group = c.benchmark_group("regression");
    group.bench_function("train_gd", |b| b.iter(|| train_gd(black_box(&ts), &cfg).unwrap()));
    group.bench_function("closed_form", |b| {
        b.iter(|| closed_form(black_box(&ts), cfg.lambda).unwrap())
    });
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("hac_cluster");
    for n in [50, 200, 800] {
        let points = gaussian_points(n, 40, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, p| {
            b.iter(|| hac_cluster(p, &ClusterConfig::default()))
        });
    }
    group.finish();
}

fn ranking(c: &mut Criterion) {
    let pool: Vec<(String, _)> = gaussian_points(343, 300, 5)
        .into_iter()
        .enumerate()
        .map(|(i, v)| (format!("p{i}"), v))
        .collect();
    let target = pool[17].1.clone();
    let key = "p17".to_string();
    c.bench_function("rank_of_correct/343", |b| {
        b.iter(|| rank_of_correct(black_box(&target), &pool, &key).unwrap())
    });
}

criterion_group!(benches, spaces, svd, regression, clustering, ranking);
criterion_main!(benches);
