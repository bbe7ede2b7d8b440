//! Sequential vs rayon execution of the batch entry points on a synthetic
//! corpus. Build without the `parallel` feature to see the fallback alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use noah_core::answer::{evaluate_with, EvalOptions};
use noah_core::baselines::{predict_with, Strategy};
use noah_core::ingest::{compute_stats_with, Dataset};
use noah_core::{AnswerType, Example, Exec, Language, NodeId, QaTurn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: [&str; 12] = [
    "the",
    "canteen",
    "has",
    "580",
    "kilograms",
    "of",
    "coal",
    "burns",
    "36",
    "every",
    "day",
    "left",
];

fn sentence(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn corpus(examples: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let examples = (0..examples)
        .map(|i| {
            let n_seg = rng.gen_range(2..=4u32);
            let n_turns = rng.gen_range(3..=7u32);
            let turns = (1..=n_turns)
                .map(|t| {
                    let mut pool: Vec<NodeId> = (1..=n_seg).map(NodeId::segment).collect();
                    pool.extend((1..t).map(NodeId::qa));
                    pool.shuffle(&mut rng);
                    pool.truncate(rng.gen_range(1..=3));
                    QaTurn {
                        turn: t,
                        question: sentence(&mut rng, 9),
                        gold_answer: format!(
                            "{} + {}",
                            rng.gen_range(1..500),
                            rng.gen_range(1..500)
                        ),
                        answer_type: AnswerType::NumericalReasoning,
                        evidence: pool,
                    }
                })
                .collect();
            Example {
                id: format!("bench-{i}"),
                language: Language::En,
                segments: (0..n_seg).map(|_| sentence(&mut rng, 12)).collect(),
                turns,
            }
        })
        .collect();
    Dataset::new(examples)
}

fn bench(c: &mut Criterion) {
    let ds = corpus(2000);
    let preds = predict_with(&ds, Strategy::RandomGraph, 1, Exec::Sequential);
    let mut group = c.benchmark_group("batch");
    group.throughput(Throughput::Elements(ds.question_count() as u64));
    group.sample_size(20);
    for (name, exec) in [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ] {
        let opts = EvalOptions {
            exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("evaluate", name), &opts, |b, opts| {
            b.iter(|| evaluate_with(&ds, &preds, opts))
        });
        group.bench_with_input(BenchmarkId::new("stats", name), &exec, |b, &exec| {
            b.iter(|| compute_stats_with(&ds, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("baseline", name), &exec, |b, &exec| {
            b.iter(|| predict_with(&ds, Strategy::RandomGraph, 7, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
