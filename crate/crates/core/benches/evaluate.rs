use criterion::{criterion_group, criterion_main, Criterion};
use fedcard::estimators::Engine;
use fedcard::eval::Evaluator;
use fedcard::fixtures::synthetic_corpus;
use fedcard::oracle::DEFAULT_ORACLE_CAP;
use fedcard::summaries::Summaries;

fn corpus_evaluation(c: &mut Criterion) {
    let corpus = synthetic_corpus(42);
    let summaries = Summaries::build(&corpus.stores);
    let ev = Evaluator::new(&corpus.stores, &summaries, DEFAULT_ORACLE_CAP);

    let mut group = c.benchmark_group("evaluate_corpus");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| ev.evaluate_corpus(&corpus.queries, &Engine::ALL)));
    group.bench_function("sequential", |b| {
        b.iter(|| ev.evaluate_corpus_sequential(&corpus.queries, &Engine::ALL))
    });
    group.finish();
}

criterion_group!(benches, corpus_evaluation);
criterion_main!(benches);
