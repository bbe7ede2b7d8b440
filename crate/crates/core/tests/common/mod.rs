#![allow(dead_code)]

use std::path::PathBuf;

use noah_core::answer::{BinOp, Expr};
use noah_core::graph::{build_reasoning_graph, count_paths, decompose_paths, DEFAULT_PATH_CAP};
use noah_core::ingest::{load_dataset, Dataset};
use noah_core::{AnswerType, Example, Language, NodeId, NodeKind, QaTurn, ReasoningGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub const VOCAB: [&str; 10] = [
    "apple", "box", "coal", "day", "price", "rope", "seven", "ten", "yuan", "left",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture_corpus() -> Dataset {
    load_dataset(fixture_path("fixture_corpus.json")).expect("fixture corpus loads")
}

pub fn phrase(rng: &mut TestRng, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n)
        .map(|_| *VOCAB.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random well-formed example: every turn cites one or two earlier nodes.
pub fn random_example(rng: &mut TestRng, id: &str, max_turns: u32, max_segments: u32) -> Example {
    let n_seg = rng.gen_range(1..=max_segments);
    let n_turns = rng.gen_range(1..=max_turns);
    let segments = (0..n_seg).map(|_| phrase(rng, 4)).collect();
    let types = AnswerType::ALL;
    let turns = (1..=n_turns)
        .map(|t| {
            let mut pool: Vec<NodeId> = (1..=n_seg).map(NodeId::segment).collect();
            pool.extend((1..t).map(NodeId::qa));
            pool.shuffle(rng);
            pool.truncate(rng.gen_range(1..=2));
            pool.sort();
            let answer_type = types[rng.gen_range(0..types.len() - 1)];
            QaTurn {
                turn: t,
                question: phrase(rng, 5),
                gold_answer: phrase(rng, 2),
                answer_type,
                evidence: pool,
            }
        })
        .collect();
    Example {
        id: id.to_string(),
        language: Language::En,
        segments,
        turns,
    }
}

fn longest_path(g: &ReasoningGraph) -> usize {
    decompose_paths(g, DEFAULT_PATH_CAP)
        .map(|p| p.paths.iter().map(Vec::len).max().unwrap_or(0))
        .unwrap_or(usize::MAX)
}

/// Random reasoning graph with at most `max_paths` paths of at most
/// `max_len` nodes, drawn by rejection from random examples.
pub fn random_graph(rng: &mut TestRng, max_paths: u128, max_len: usize) -> ReasoningGraph {
    loop {
        let ex = random_example(rng, "g", 5, 4);
        let t = rng.gen_range(1..=ex.turns.len() as u32);
        let g = build_reasoning_graph(&ex, t, None).expect("generated example is valid");
        if count_paths(&g) <= max_paths && longest_path(&g) <= max_len {
            return g;
        }
    }
}

/// Random path of `len` nodes drawn from segment and qa nodes.
pub fn random_path(rng: &mut TestRng, len: usize) -> Vec<(NodeKind, String)> {
    (0..len)
        .map(|_| {
            let kind = if rng.gen_bool(0.5) {
                NodeKind::Segment
            } else {
                NodeKind::QaTurn
            };
            (kind, phrase(rng, 3))
        })
        .collect()
}

pub fn random_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

fn random_literal(rng: &mut TestRng) -> Expr {
    let value = f64::from(rng.gen_range(0u32..100_000)) / 100.0;
    match rng.gen_range(0..6) {
        0 => Expr::Pi,
        1 => Expr::Percent(value),
        _ => Expr::Number(value),
    }
}

/// Random expression tree of depth at most `depth`.
pub fn random_expr(rng: &mut TestRng, depth: usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return random_literal(rng);
    }
    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.gen_range(0..4)];
    Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
}

/// Random DAG on `n` nodes as an edge list over indices, edges from higher
/// to lower index (node 0 is the sink).
pub fn random_dag_edges(rng: &mut TestRng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for from in 1..n {
        for to in 0..from {
            if rng.gen_bool(p) {
                edges.push((from, to));
            }
        }
    }
    edges
}
