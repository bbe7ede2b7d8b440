//! Evaluation toolkit for multi-turn numerical question answering with
//! reasoning graphs: dataset ingestion, graph construction, DAG similarity,
//! answer normalization, brute-force oracles and heuristic baselines.

pub mod answer;
pub mod baselines;
pub mod error;
pub mod exec;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod simeval;
pub mod text;

pub use answer::{em, evaluate, evaluate_with, normalize_answer, CanonicalAnswer, EvalOptions};
pub use exec::Exec;
pub use graph::{build_candidate_graph, build_reasoning_graph, decompose_paths, validate_dag};
pub use ingest::{load_dataset, load_predictions, Dataset, PredictionSet};
pub use model::*;
pub use simeval::{dag_sim, gem, DagSimConfig};
