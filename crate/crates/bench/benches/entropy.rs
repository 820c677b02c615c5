use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use review_miner_bench::labeled_documents;
use review_miner_core::keywords::{class_entropy, select_keywords, EntropyTable};
use review_miner_core::textproc::TermClassCounts;
use review_miner_core::Quarters;
use std::hint::black_box;

fn bench_entropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("entropy");

    let counts: Vec<u32> = (0..1_000).map(|i| (i * 7919) % 23).collect();
    group.bench_function("class_entropy/1000_documents", |b| {
        b.iter(|| class_entropy(black_box(&counts)))
    });

    let docs = labeled_documents(400, 300);
    group.bench_function("table/400_docs_300_terms", |b| {
        b.iter_batched(
            || TermClassCounts::from_labeled(&docs),
            |counts| EntropyTable::from_counts(black_box(&counts)),
            BatchSize::SmallInput,
        )
    });

    let table = EntropyTable::from_counts(&TermClassCounts::from_labeled(&docs));
    let alpha = Quarters::from_quarter_count(6);
    group.bench_function("select/300_terms", |b| {
        b.iter(|| select_keywords(black_box(&table), alpha, alpha))
    });

    group.finish();
}

criterion_group!(benches, bench_entropy);
criterion_main!(benches);
