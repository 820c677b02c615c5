use criterion::{criterion_group, criterion_main, Criterion};
use review_miner_bench::training_problem;
use review_miner_core::classifier::train_svc;
use review_miner_core::{KeywordSet, Language, Quarters};
use std::hint::black_box;

fn keyword_set(dim: usize) -> KeywordSet {
    let alpha = Quarters::from_quarter_count(6);
    KeywordSet::new(
        alpha,
        alpha,
        (0..dim.div_ceil(2)).map(|i| format!("p{i}")).collect(),
        (0..dim / 2).map(|i| format!("n{i}")).collect(),
    )
}

fn bench_train(c: &mut Criterion) {
    let mut group = c.benchmark_group("train");
    group.sample_size(20);

    for (samples, dim) in [(100, 20), (300, 40)] {
        let (xs, ys) = training_problem(samples, dim);
        let set = keyword_set(dim);
        group.bench_function(format!("svc/{samples}x{dim}"), |b| {
            b.iter(|| {
                train_svc(
                    black_box(&xs),
                    black_box(&ys),
                    set.clone(),
                    Language::English,
                    1.0,
                    42,
                )
                .unwrap()
            })
        });
    }

    group.finish();
}

criterion_group!(benches, bench_train);
criterion_main!(benches);
