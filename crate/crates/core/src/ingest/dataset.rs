use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::answer::{normalize_answer, CanonicalAnswer};
use crate::error::IngestError;
use crate::model::{AnswerType, Example, NodeId, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub split: Option<Split>,
}

impl Dataset {
    pub fn new(examples: Vec<Example>) -> Self {
        Dataset {
            examples,
            split: None,
        }
    }

    pub fn get(&self, id: &str) -> Option<&Example> {
        self.examples.iter().find(|e| e.id == id)
    }

    /// Number of (example, turn) questions.
    pub fn question_count(&self) -> usize {
        self.examples.iter().map(|e| e.turns.len()).sum()
    }

    /// Serializes to the dataset file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.examples).expect("examples serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Schema,
    EmptyId,
    DuplicateId,
    EmptySegments,
    EmptyTurns,
    TurnNumbering,
    SegmentOutOfRange,
    Chronology,
    RootInEvidence,
    DuplicateEvidence,
    UnanswerableAnswer,
    QaLeaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub example_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub turn: Option<u32>,
    pub field: String,
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn new(
        ex: &Example,
        turn: Option<u32>,
        field: &str,
        kind: ViolationKind,
        message: String,
    ) -> Self {
        Violation {
            example_id: ex.id.clone(),
            turn,
            field: field.to_string(),
            kind,
            message,
        }
    }
}

/// All invariant violations of one example. `strict` additionally flags
/// turns whose evidence chain ends at a history turn that itself has no
/// evidence (unless that turn is unanswerable).
pub fn validate_example(ex: &Example, strict: bool) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    if ex.id.is_empty() {
        out.push(Violation::new(
            ex,
            None,
            "id",
            EmptyId,
            "example id is empty".into(),
        ));
    }
    if ex.segments.is_empty() {
        out.push(Violation::new(
            ex,
            None,
            "segments",
            EmptySegments,
            "passage has no segments".into(),
        ));
    }
    if ex.turns.is_empty() {
        out.push(Violation::new(
            ex,
            None,
            "turns",
            EmptyTurns,
            "conversation has no turns".into(),
        ));
    }
    for (i, turn) in ex.turns.iter().enumerate() {
        let expected = i as u32 + 1;
        if turn.turn != expected {
            out.push(Violation::new(
                ex,
                Some(turn.turn),
                "turn",
                TurnNumbering,
                format!("turn at position {expected} is numbered {}", turn.turn),
            ));
        }
    }
    let n_segments = ex.segments.len() as u32;
    for turn in &ex.turns {
        let t = turn.turn;
        let mut seen = HashSet::new();
        for &e in &turn.evidence {
            if !seen.insert(e) {
                out.push(Violation::new(
                    ex,
                    Some(t),
                    "evidence",
                    DuplicateEvidence,
                    format!("{e} listed twice"),
                ));
            }
            match e.kind() {
                NodeKind::Segment if e.index() > n_segments => out.push(Violation::new(
                    ex,
                    Some(t),
                    "evidence",
                    SegmentOutOfRange,
                    format!("{e} exceeds the {n_segments} passage segments"),
                )),
                NodeKind::QaTurn if e.index() >= t => out.push(Violation::new(
                    ex,
                    Some(t),
                    "evidence",
                    Chronology,
                    format!("chronology violation: turn {t} cites {e}"),
                )),
                NodeKind::RootQuestion => out.push(Violation::new(
                    ex,
                    Some(t),
                    "evidence",
                    RootInEvidence,
                    format!("{e} is a question node and cannot be evidence"),
                )),
                _ => {}
            }
        }
        if turn.answer_type == AnswerType::Unanswerable
            && normalize_answer(&turn.gold_answer, ex.language) != CanonicalAnswer::Unknown
        {
            out.push(Violation::new(
                ex,
                Some(t),
                "answer",
                UnanswerableAnswer,
                format!("unanswerable turn has answer `{}`", turn.gold_answer),
            ));
        }
    }
    if strict {
        for turn in &ex.turns {
            for leaf in qa_leaves(ex, turn.turn) {
                out.push(Violation::new(
                    ex,
                    Some(turn.turn),
                    "evidence",
                    QaLeaf,
                    format!("evidence chain stops at {leaf}, which has no evidence of its own"),
                ));
            }
        }
    }
    out
}

/// History turns reachable from turn `t` that have no evidence and are not
/// unanswerable.
fn qa_leaves(ex: &Example, t: u32) -> Vec<NodeId> {
    let mut leaves = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut queue: VecDeque<u32> = VecDeque::from([t]);
    while let Some(consumer) = queue.pop_front() {
        let Some(turn) = ex.turn(consumer) else {
            continue;
        };
        for e in &turn.evidence {
            if e.kind() != NodeKind::QaTurn || e.index() >= consumer || !seen.insert(e.index()) {
                continue;
            }
            match ex.turn(e.index()) {
                Some(cited) if cited.evidence.is_empty() => {
                    if cited.answer_type != AnswerType::Unanswerable {
                        leaves.insert(*e);
                    }
                }
                Some(_) => queue.push_back(e.index()),
                None => {}
            }
        }
    }
    leaves.into_iter().collect()
}

/// Violations across a whole dataset, including duplicate ids.
pub fn validate_dataset(examples: &[Example], strict: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for ex in examples {
        if !ids.insert(ex.id.as_str()) {
            out.push(Violation::new(
                ex,
                None,
                "id",
                ViolationKind::DuplicateId,
                format!("duplicate example id `{}`", ex.id),
            ));
        }
        out.extend(validate_example(ex, strict));
    }
    out
}

/// Parses the dataset file format without checking invariants.
pub fn parse_examples(json: &str) -> Result<Vec<Example>, IngestError> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(json).map_err(|e| IngestError::Schema(e.to_string()))?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let id = v.get("id").and_then(|x| x.as_str()).map(str::to_string);
            serde_json::from_value(v).map_err(|e| match id {
                Some(id) => IngestError::Schema(format!("example `{id}`: {e}")),
                None => IngestError::Schema(format!("element {i}: {e}")),
            })
        })
        .collect()
}

/// Parses and validates a dataset; the first violation becomes the error.
pub fn parse_dataset(json: &str) -> Result<Dataset, IngestError> {
    let examples = parse_examples(json)?;
    if let Some(v) = validate_dataset(&examples, false).into_iter().next() {
        if v.kind == ViolationKind::DuplicateId {
            return Err(IngestError::DuplicateExample(v.example_id));
        }
        let field = match v.turn {
            Some(t) => format!("turn {t} {}", v.field),
            None => v.field,
        };
        return Err(IngestError::Invalid {
            example_id: v.example_id,
            field,
            message: v.message,
        });
    }
    Ok(Dataset::new(examples))
}

pub fn read_text(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, IngestError> {
    parse_dataset(&read_text(path.as_ref())?)
}
