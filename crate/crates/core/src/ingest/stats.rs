use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::exec::{self, Exec};
use crate::model::{AnswerType, Example, NodeId};
use crate::text::{normalized_tokens, token_count};

use super::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvgMax {
    pub avg: f64,
    pub max: u64,
}

/// Descriptive statistics of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub example_count: u64,
    pub qa_pairs_per_example: AvgMax,
    pub segments_per_passage: AvgMax,
    pub tokens_per_passage: AvgMax,
    pub tokens_per_question: AvgMax,
    pub tokens_per_answer: AvgMax,
    pub evidences_per_question: AvgMax,
    /// Fraction of questions per answer type.
    pub qa_type_distribution: BTreeMap<String, f64>,
    /// First two lowercased question tokens -> count.
    pub question_prefix_bigrams: BTreeMap<String, u64>,
    /// Turn asked -> cited evidence node -> count.
    pub evidence_position_matrix: BTreeMap<u32, BTreeMap<NodeId, u64>>,
}

#[derive(Debug, Clone, Copy, Default)]
struct SumMax {
    sum: u64,
    max: u64,
}

impl SumMax {
    fn add(&mut self, v: u64) {
        self.sum += v;
        self.max = self.max.max(v);
    }

    fn merge(&mut self, o: SumMax) {
        self.sum += o.sum;
        self.max = self.max.max(o.max);
    }

    fn avg_over(self, n: u64) -> AvgMax {
        AvgMax {
            avg: if n == 0 {
                0.0
            } else {
                self.sum as f64 / n as f64
            },
            max: self.max,
        }
    }
}

/// Per-example partial counts; merging is associative and commutative.
#[derive(Debug, Default)]
struct Tally {
    examples: u64,
    questions: u64,
    qa_pairs: SumMax,
    segments: SumMax,
    passage_tokens: SumMax,
    question_tokens: SumMax,
    answer_tokens: SumMax,
    evidences: SumMax,
    types: BTreeMap<AnswerType, u64>,
    bigrams: BTreeMap<String, u64>,
    positions: BTreeMap<u32, BTreeMap<NodeId, u64>>,
}

impl Tally {
    fn of(ex: &Example) -> Self {
        let mut t = Tally {
            examples: 1,
            ..Default::default()
        };
        t.qa_pairs.add(ex.turns.len() as u64);
        t.segments.add(ex.segments.len() as u64);
        t.passage_tokens
            .add(ex.segments.iter().map(|s| token_count(s) as u64).sum());
        for turn in &ex.turns {
            t.questions += 1;
            t.question_tokens.add(token_count(&turn.question) as u64);
            t.answer_tokens.add(token_count(&turn.gold_answer) as u64);
            t.evidences.add(turn.evidence.len() as u64);
            *t.types.entry(turn.answer_type).or_default() += 1;
            let tokens = normalized_tokens(&turn.question);
            if !tokens.is_empty() {
                let prefix = tokens[..tokens.len().min(2)].join(" ");
                *t.bigrams.entry(prefix).or_default() += 1;
            }
            let row = t.positions.entry(turn.turn).or_default();
            for e in &turn.evidence {
                *row.entry(*e).or_default() += 1;
            }
        }
        t
    }

    fn merge(mut self, o: Tally) -> Self {
        self.examples += o.examples;
        self.questions += o.questions;
        self.qa_pairs.merge(o.qa_pairs);
        self.segments.merge(o.segments);
        self.passage_tokens.merge(o.passage_tokens);
        self.question_tokens.merge(o.question_tokens);
        self.answer_tokens.merge(o.answer_tokens);
        self.evidences.merge(o.evidences);
        for (k, v) in o.types {
            *self.types.entry(k).or_default() += v;
        }
        for (k, v) in o.bigrams {
            *self.bigrams.entry(k).or_default() += v;
        }
        for (turn, row) in o.positions {
            let mine = self.positions.entry(turn).or_default();
            for (node, v) in row {
                *mine.entry(node).or_default() += v;
            }
        }
        self
    }
}

pub fn compute_stats(ds: &Dataset) -> Result<StatsReport, IngestError> {
    compute_stats_with(ds, Exec::default())
}

pub fn compute_stats_with(ds: &Dataset, exec: Exec) -> Result<StatsReport, IngestError> {
    if ds.examples.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let tally = exec::map(exec, &ds.examples, Tally::of)
        .into_iter()
        .fold(Tally::default(), Tally::merge);
    let (n, q) = (tally.examples, tally.questions);
    let qa_type_distribution = AnswerType::ALL
        .iter()
        .map(|t| {
            let c = tally.types.get(t).copied().unwrap_or(0);
            (
                t.name().to_string(),
                if q == 0 { 0.0 } else { c as f64 / q as f64 },
            )
        })
        .collect();
    Ok(StatsReport {
        example_count: n,
        qa_pairs_per_example: tally.qa_pairs.avg_over(n),
        segments_per_passage: tally.segments.avg_over(n),
        tokens_per_passage: tally.passage_tokens.avg_over(n),
        tokens_per_question: tally.question_tokens.avg_over(q),
        tokens_per_answer: tally.answer_tokens.avg_over(q),
        evidences_per_question: tally.evidences.avg_over(q),
        qa_type_distribution,
        question_prefix_bigrams: tally.bigrams,
        evidence_position_matrix: tally.positions,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flat CSV of the bigram table and the evidence position matrix:
/// `table,row,col,value`.
pub fn stats_csv(report: &StatsReport) -> String {
    let mut out = String::from("table,row,col,value\n");
    for (bigram, count) in &report.question_prefix_bigrams {
        let _ = writeln!(out, "question_prefix_bigram,{},,{count}", csv_field(bigram));
    }
    for (turn, row) in &report.evidence_position_matrix {
        for (node, count) in row {
            let _ = writeln!(out, "evidence_position,{turn},{node},{count}");
        }
    }
    out
}
