use std::collections::BTreeMap;

use crate::exec::{self, kahan_sum, Exec};
use crate::graph::{build_reasoning_graph, materialize_prediction};
use crate::ingest::{Dataset, PredictionSet};
use crate::model::{AnswerType, EvalCounts, EvalReport, Example, SimilarityKind};
use crate::simeval::{dag_sim, gem, DagSimConfig};

use super::{em_with, AnswerOptions};

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub dag: DagSimConfig,
    pub answers: AnswerOptions,
    pub exec: Exec,
}

#[derive(Debug, Clone)]
struct QuestionScore {
    turn: u32,
    answer_type: AnswerType,
    predicted: bool,
    em: bool,
    gem: bool,
    dag_sim: f64,
    diagnostics: Vec<String>,
}

fn score_example(ex: &Example, preds: &PredictionSet, opts: &EvalOptions) -> Vec<QuestionScore> {
    ex.turns
        .iter()
        .map(|turn| {
            let t = turn.turn;
            let mut s = QuestionScore {
                turn: t,
                answer_type: turn.answer_type,
                predicted: false,
                em: false,
                gem: false,
                dag_sim: 0.0,
                diagnostics: Vec::new(),
            };
            let Some(pred) = preds.get(&ex.id, t) else {
                return s;
            };
            s.predicted = true;
            s.em = em_with(&turn.gold_answer, &pred.answer, ex.language, opts.answers);
            let gold = match build_reasoning_graph(ex, t, None) {
                Ok(g) => g,
                Err(e) => {
                    s.diagnostics
                        .push(format!("{} turn {t}: gold graph: {e}", ex.id));
                    return s;
                }
            };
            let predicted = match materialize_prediction(ex, t, &pred.edges) {
                Ok(h) => h,
                Err(e) => {
                    s.diagnostics
                        .push(format!("{} turn {t}: predicted graph: {e}", ex.id));
                    return s;
                }
            };
            s.gem = gem(&gold, &predicted);
            match dag_sim(&gold, &predicted, &opts.dag) {
                Ok(v) => s.dag_sim = v,
                Err(e) => s
                    .diagnostics
                    .push(format!("{} turn {t}: dag_sim: {e}", ex.id)),
            }
            s
        })
        .collect()
}

fn percent(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

/// Scores predictions against a dataset with default options.
pub fn evaluate(ds: &Dataset, preds: &PredictionSet, cfg: SimilarityKind) -> EvalReport {
    evaluate_with(
        ds,
        preds,
        &EvalOptions {
            dag: DagSimConfig::from(cfg),
            ..Default::default()
        },
    )
}

/// Exact match, graph exact match and mean DAG similarity, overall and
/// broken down by answer type and by turn. Missing or malformed predictions
/// score zero; problems are listed in `diagnostics`.
pub fn evaluate_with(ds: &Dataset, preds: &PredictionSet, opts: &EvalOptions) -> EvalReport {
    let scores: Vec<QuestionScore> =
        exec::map(opts.exec, &ds.examples, |ex| score_example(ex, preds, opts))
            .into_iter()
            .flatten()
            .collect();

    let total = scores.len();
    let mut counts = EvalCounts {
        overall: total,
        ..Default::default()
    };
    let mut type_hits: BTreeMap<String, usize> = BTreeMap::new();
    let mut turn_hits: BTreeMap<u32, usize> = BTreeMap::new();
    let mut em_hits = 0;
    let mut gem_hits = 0;
    let mut diagnostics = Vec::new();
    for s in &scores {
        let name = s.answer_type.name().to_string();
        *counts.per_type.entry(name.clone()).or_default() += 1;
        *counts.per_turn.entry(s.turn).or_default() += 1;
        let hit = usize::from(s.em);
        *type_hits.entry(name).or_default() += hit;
        *turn_hits.entry(s.turn).or_default() += hit;
        em_hits += hit;
        gem_hits += usize::from(s.gem);
        counts.predicted += usize::from(s.predicted);
        diagnostics.extend(s.diagnostics.iter().cloned());
    }
    for (id, turn) in preds.entries.keys() {
        if ds.get(id).and_then(|ex| ex.turn(*turn)).is_none() {
            diagnostics.push(format!(
                "{id} turn {turn}: prediction for a question not in the dataset"
            ));
        }
    }
    let dag_values: Vec<f64> = scores.iter().map(|s| s.dag_sim).collect();

    EvalReport {
        overall_em: percent(em_hits, total),
        per_type_em: type_hits
            .iter()
            .map(|(k, &h)| (k.clone(), percent(h, counts.per_type[k])))
            .collect(),
        per_turn_em: turn_hits
            .iter()
            .map(|(k, &h)| (*k, percent(h, counts.per_turn[k])))
            .collect(),
        gem: percent(gem_hits, total),
        dag_sim: if total == 0 {
            0.0
        } else {
            100.0 * kahan_sum(&dag_values) / total as f64
        },
        counts,
        diagnostics,
    }
}
