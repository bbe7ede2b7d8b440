//! Shared domain types: node identities, examples, reasoning graphs and the
//! intermediate structures of the graph similarity metric.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::NodeIdError;

/// Kind of a reasoning-graph node. The declaration order is the sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Segment,
    QaTurn,
    RootQuestion,
}

impl NodeKind {
    fn prefix(self) -> &'static str {
        match self {
            NodeKind::Segment => "seg",
            NodeKind::QaTurn => "qa",
            NodeKind::RootQuestion => "q",
        }
    }
}

/// Canonical identity of a node: `seg:k`, `qa:t` or `q:t`, with a 1-based index.
///
/// Ordering is by kind (segments, then QA turns, then the root) and then by
/// index, so sorting node lists is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    kind: NodeKind,
    index: u32,
}

impl NodeId {
    pub fn new(kind: NodeKind, index: u32) -> Result<Self, NodeIdError> {
        if index == 0 {
            return Err(NodeIdError::ZeroIndex(format!("{}:0", kind.prefix())));
        }
        Ok(NodeId { kind, index })
    }

    pub fn segment(k: u32) -> Self {
        Self::new(NodeKind::Segment, k).expect("segment index must be >= 1")
    }

    pub fn qa(t: u32) -> Self {
        Self::new(NodeKind::QaTurn, t).expect("turn index must be >= 1")
    }

    pub fn root(t: u32) -> Self {
        Self::new(NodeKind::RootQuestion, t).expect("turn index must be >= 1")
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

/// Parses a canonical node id string such as `seg:3`.
pub fn parse_node_id(text: &str) -> Result<NodeId, NodeIdError> {
    text.parse()
}

impl FromStr for NodeId {
    type Err = NodeIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (prefix, digits) = s
            .split_once(':')
            .ok_or_else(|| NodeIdError::Malformed(s.to_string()))?;
        let kind = match prefix {
            "seg" => NodeKind::Segment,
            "qa" => NodeKind::QaTurn,
            "q" => NodeKind::RootQuestion,
            _ => return Err(NodeIdError::UnknownKind(s.to_string())),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(NodeIdError::BadIndex(s.to_string()));
        }
        let index: u32 = digits
            .parse()
            .map_err(|_| NodeIdError::BadIndex(s.to_string()))?;
        if index == 0 {
            return Err(NodeIdError::ZeroIndex(s.to_string()));
        }
        NodeId::new(kind, index)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.prefix(), self.index)
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnswerType {
    #[serde(rename = "Extraction")]
    Extraction,
    #[serde(rename = "Numerical Reasoning", alias = "NumericalReasoning")]
    NumericalReasoning,
    #[serde(rename = "Counterfactual")]
    Counterfactual,
    #[serde(rename = "Comparison")]
    Comparison,
    #[serde(rename = "Yes/No", alias = "YesNo")]
    YesNo,
    #[serde(rename = "Unanswerable")]
    Unanswerable,
}

impl AnswerType {
    pub const ALL: [AnswerType; 6] = [
        AnswerType::Extraction,
        AnswerType::NumericalReasoning,
        AnswerType::Counterfactual,
        AnswerType::Comparison,
        AnswerType::YesNo,
        AnswerType::Unanswerable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnswerType::Extraction => "Extraction",
            AnswerType::NumericalReasoning => "Numerical Reasoning",
            AnswerType::Counterfactual => "Counterfactual",
            AnswerType::Comparison => "Comparison",
            AnswerType::YesNo => "Yes/No",
            AnswerType::Unanswerable => "Unanswerable",
        }
    }
}

impl fmt::Display for AnswerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    Zh,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaTurn {
    pub turn: u32,
    pub question: String,
    #[serde(rename = "answer")]
    pub gold_answer: String,
    #[serde(rename = "type")]
    pub answer_type: AnswerType,
    /// First-order evidence, in annotation order.
    #[serde(default)]
    pub evidence: Vec<NodeId>,
}

/// One passage with its conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    #[serde(default)]
    pub language: Language,
    pub segments: Vec<String>,
    pub turns: Vec<QaTurn>,
}

impl Example {
    /// Turn `t` (1-based), if present.
    pub fn turn(&self, t: u32) -> Option<&QaTurn> {
        let idx = (t as usize).checked_sub(1)?;
        self.turns.get(idx).filter(|turn| turn.turn == t)
    }

    /// Whether `node` names something that exists in this example.
    pub fn resolves(&self, node: NodeId) -> bool {
        match node.kind() {
            NodeKind::Segment => node.index() as usize <= self.segments.len(),
            NodeKind::QaTurn | NodeKind::RootQuestion => self.turn(node.index()).is_some(),
        }
    }

    /// Text carried by `node`: the segment text, `Q: <question> A: <answer>`
    /// for a history turn, or the bare question for the root.
    pub fn node_text(&self, node: NodeId) -> Option<String> {
        match node.kind() {
            NodeKind::Segment => self.segments.get(node.index() as usize - 1).cloned(),
            NodeKind::QaTurn => self
                .turn(node.index())
                .map(|t| format!("Q: {} A: {}", t.question, t.gold_answer)),
            NodeKind::RootQuestion => self.turn(node.index()).map(|t| t.question.clone()),
        }
    }
}

/// A rooted DAG of evidence relations. Edges point from evidence to consumer.
///
/// Construction does not validate; see [`crate::graph::validate_dag`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningGraph {
    root: NodeId,
    nodes: BTreeMap<NodeId, String>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl ReasoningGraph {
    pub fn from_parts(
        root: NodeId,
        nodes: BTreeMap<NodeId, String>,
        edges: BTreeSet<(NodeId, NodeId)>,
    ) -> Self {
        ReasoningGraph { root, nodes, edges }
    }

    /// Graph holding only the root, as for a question with no evidence.
    pub fn root_only(root: NodeId, text: impl Into<String>) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(root, text.into());
        ReasoningGraph {
            root,
            nodes,
            edges: BTreeSet::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn text(&self, node: NodeId) -> Option<&str> {
        self.nodes.get(&node).map(String::as_str)
    }

    /// Evidence of `consumer`, sorted.
    pub fn evidence_of(&self, consumer: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges
            .iter()
            .filter(move |(_, dst)| *dst == consumer)
            .map(|(src, _)| *src)
    }

    /// Same structure and texts with node ids rewritten by `f`.
    pub fn relabel(&self, mut f: impl FnMut(NodeId) -> NodeId) -> Self {
        let nodes = self.nodes.iter().map(|(k, v)| (f(*k), v.clone())).collect();
        let edges = self.edges.iter().map(|(a, b)| (f(*a), f(*b))).collect();
        ReasoningGraph {
            root: f(self.root),
            nodes,
            edges,
        }
    }
}

/// Root-to-source paths of a graph, root first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSet {
    pub paths: Vec<Vec<NodeId>>,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentResult {
    pub raw_score: f64,
    pub normalized_score: f64,
    /// Matched (position in first path, position in second path), strictly
    /// increasing in both coordinates.
    pub matched_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedPair {
    pub row: usize,
    pub col: usize,
    pub weight: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    /// Sorted by row.
    pub pairs: Vec<MatchedPair>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_pred: Vec<usize>,
}

impl Matching {
    /// Sum of `weight` over pairs, accumulated in row order.
    pub fn total_weight(&self) -> f64 {
        self.pairs.iter().fold(0.0, |acc, p| acc + p.weight)
    }

    /// Sum of `weight * score` over pairs, accumulated in row order.
    pub fn weighted_score(&self) -> f64 {
        self.pairs
            .iter()
            .fold(0.0, |acc, p| acc + p.weight * p.score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Exact,
    #[default]
    TokenF1,
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Measure::Exact),
            "token-f1" | "token_f1" => Ok(Measure::TokenF1),
            other => Err(format!(
                "unknown similarity `{other}` (expected exact or token-f1)"
            )),
        }
    }
}

/// Node similarity configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct SimilarityKind {
    pub measure: Measure,
    /// Nodes of different kinds score 0.
    pub kind_gate: bool,
}

/// Aggregate scores over a batch of questions. Percentages are on 0..=100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall_em: f64,
    pub per_type_em: BTreeMap<String, f64>,
    pub per_turn_em: BTreeMap<u32, f64>,
    pub gem: f64,
    pub dag_sim: f64,
    pub counts: EvalCounts,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EvalCounts {
    pub overall: usize,
    pub predicted: usize,
    pub per_type: BTreeMap<String, usize>,
    pub per_turn: BTreeMap<u32, usize>,
}
