mod common;

use std::fs;

use common::*;
use noah_core::answer::{evaluate_with, EvalOptions};
use noah_core::baselines::{predict, predict_with, Strategy};
use noah_core::graph::{count_paths, materialize_prediction};
use noah_core::ingest::{Dataset, PredictionSet};
use noah_core::oracle::{reference_evaluate, MAX_PATHS};
use noah_core::{evaluate, EvalReport, Exec, SimilarityKind};

/// Drops predictions whose graphs are too large for the brute-force oracle.
fn within_oracle_limits(ds: &Dataset, mut preds: PredictionSet) -> PredictionSet {
    preds.entries.retain(|(id, t), p| {
        materialize_prediction(ds.get(id).unwrap(), *t, &p.edges)
            .is_ok_and(|g| count_paths(&g) <= MAX_PATHS as u128)
    });
    preds
}

fn assert_reports_agree(a: &EvalReport, b: &EvalReport) {
    assert_eq!(a.counts, b.counts);
    assert_eq!(a.overall_em, b.overall_em);
    assert_eq!(a.per_type_em, b.per_type_em);
    assert_eq!(a.per_turn_em, b.per_turn_em);
    assert_eq!(a.gem, b.gem);
    assert!(
        (a.dag_sim - b.dag_sim).abs() <= 1e-9,
        "{} vs {}",
        a.dag_sim,
        b.dag_sim
    );
}

/// Report of the nearest-evidence baseline, produced by the reference
/// evaluator and frozen. Set BLESS=1 to regenerate.
#[test]
fn nearest_evidence_matches_frozen_reference() {
    let ds = fixture_corpus();
    let preds = predict(&ds, Strategy::NearestEvidence, 0);
    let path = fixture_path("nearest_evidence.golden.json");
    if std::env::var_os("BLESS").is_some() {
        let reference = reference_evaluate(&ds, &preds, SimilarityKind::default(), false);
        fs::write(
            &path,
            serde_json::to_string_pretty(&reference).unwrap() + "\n",
        )
        .unwrap();
    }
    let golden: EvalReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_reports_agree(&evaluate(&ds, &preds, SimilarityKind::default()), &golden);
    assert_reports_agree(
        &reference_evaluate(&ds, &preds, SimilarityKind::default(), false),
        &golden,
    );
}

#[test]
fn fast_and_reference_evaluators_agree_on_baselines() {
    let ds = fixture_corpus();
    for strategy in [
        Strategy::GoldEcho,
        Strategy::NearestEvidence,
        Strategy::RandomGraph,
    ] {
        for seed in [0, 7, 99] {
            let preds = within_oracle_limits(&ds, predict(&ds, strategy, seed));
            assert!(
                preds.len() * 2 > ds.question_count(),
                "most predictions stay comparable"
            );
            for sim in [
                SimilarityKind::default(),
                SimilarityKind {
                    kind_gate: true,
                    ..Default::default()
                },
            ] {
                for exclude_root in [false, true] {
                    let opts = EvalOptions {
                        dag: noah_core::DagSimConfig {
                            similarity: sim,
                            exclude_root,
                            ..Default::default()
                        },
                        ..Default::default()
                    };
                    let reference = reference_evaluate(&ds, &preds, sim, exclude_root);
                    assert_eq!(reference.diagnostics, Vec::<String>::new());
                    assert_reports_agree(&evaluate_with(&ds, &preds, &opts), &reference);
                }
            }
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let ds = fixture_corpus();
    for strategy in [Strategy::NearestEvidence, Strategy::RandomGraph] {
        let seq = predict_with(&ds, strategy, 3, Exec::Sequential);
        assert_eq!(seq, predict_with(&ds, strategy, 3, Exec::Parallel));
        let run = |exec| {
            let opts = EvalOptions {
                exec,
                ..Default::default()
            };
            serde_json::to_string(&evaluate_with(&ds, &seq, &opts)).unwrap()
        };
        assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
    }
}

#[test]
fn missing_and_malformed_predictions_score_zero() {
    let ds = fixture_corpus();
    let mut preds = predict(&ds, Strategy::GoldEcho, 0);
    let total = preds.len();
    preds.entries.remove(&("sandals".to_string(), 2));
    let bad = preds.entries.get_mut(&("diamond".to_string(), 3)).unwrap();
    bad.edges.reverse();
    bad.edges
        .push((noah_core::NodeId::qa(3), noah_core::NodeId::root(3)));
    let r = evaluate(&ds, &preds, SimilarityKind::default());
    assert_eq!(r.counts.predicted, total - 1);
    assert!((r.overall_em - 100.0 * (total - 1) as f64 / total as f64).abs() < 1e-9);
    assert!((r.gem - 100.0 * (total - 2) as f64 / total as f64).abs() < 1e-9);
    assert!(
        r.diagnostics
            .iter()
            .any(|d| d.starts_with("diamond turn 3")),
        "{:?}",
        r.diagnostics
    );
}
