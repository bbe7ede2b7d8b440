use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::model::NodeId;

use super::dataset::read_text;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prediction {
    pub answer: String,
    /// Evidence -> consumer edges.
    pub edges: Vec<(NodeId, NodeId)>,
}

/// Predictions keyed by (example id, turn).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionSet {
    pub entries: BTreeMap<(String, u32), Prediction>,
}

impl PredictionSet {
    pub fn get(&self, example_id: &str, turn: u32) -> Option<&Prediction> {
        self.entries.get(&(example_id.to_string(), turn))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes one JSON line per entry in key order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for ((example_id, turn), p) in &self.entries {
            let record = PredictionRecord {
                example_id: example_id.clone(),
                turn: *turn,
                answer: p.answer.clone(),
                edges: p.edges.iter().map(|&(a, b)| [a, b]).collect(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PredictionRecord {
    example_id: String,
    turn: u32,
    answer: String,
    #[serde(default)]
    edges: Vec<[NodeId; 2]>,
}

pub fn parse_predictions(jsonl: &str) -> Result<PredictionSet, IngestError> {
    let mut set = PredictionSet::default();
    for (i, line) in jsonl.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord =
            serde_json::from_str(line).map_err(|e| IngestError::PredictionLine {
                line: line_no,
                message: e.to_string(),
            })?;
        let key = (rec.example_id, rec.turn);
        if set.entries.contains_key(&key) {
            return Err(IngestError::DuplicatePrediction {
                line: line_no,
                example_id: key.0,
                turn: key.1,
            });
        }
        let edges = rec.edges.into_iter().map(|[a, b]| (a, b)).collect();
        set.entries.insert(
            key,
            Prediction {
                answer: rec.answer,
                edges,
            },
        );
    }
    Ok(set)
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<PredictionSet, IngestError> {
    parse_predictions(&read_text(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"example_id":"e1","turn":3,"answer":"19","edges":[["seg:1","q:3"]]}"#;

    #[test]
    fn single_line() {
        let set = parse_predictions(LINE).unwrap();
        assert_eq!(set.len(), 1);
        let p = set.get("e1", 3).unwrap();
        assert_eq!(p.answer, "19");
        assert_eq!(p.edges, [(NodeId::segment(1), NodeId::root(3))]);
        assert_eq!(set.to_jsonl(), format!("{LINE}\n"));
    }

    #[test]
    fn duplicate_key() {
        let err = parse_predictions(&format!("{LINE}\n\n{LINE}\n")).unwrap_err();
        assert!(matches!(
            err,
            IngestError::DuplicatePrediction {
                line: 3,
                turn: 3,
                ..
            }
        ));
    }

    #[test]
    fn bad_node_id() {
        let err = parse_predictions(&LINE.replace("seg:1", "seg:x")).unwrap_err();
        match err {
            IngestError::PredictionLine { line: 1, message } => {
                assert!(message.contains("`seg:x`"), "{message}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_edges_default_to_empty() {
        let set = parse_predictions(r#"{"example_id":"e","turn":1,"answer":"Yes"}"#).unwrap();
        assert!(set.get("e", 1).unwrap().edges.is_empty());
    }
}
