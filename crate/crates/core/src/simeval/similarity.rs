use crate::model::{Measure, NodeKind, SimilarityKind};
use crate::text::normalized_tokens;

/// A node as seen by the similarity function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRef<'a> {
    pub kind: NodeKind,
    pub text: &'a str,
}

impl<'a> NodeRef<'a> {
    pub fn new(kind: NodeKind, text: &'a str) -> Self {
        NodeRef { kind, text }
    }
}

/// Node text reduced to what similarity looks at: kind plus lowercased
/// tokens in order, and the same tokens sorted for multiset overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PreparedNode {
    kind: NodeKind,
    tokens: Vec<String>,
    sorted: Vec<String>,
}

impl PreparedNode {
    pub(crate) fn new(node: NodeRef<'_>) -> Self {
        let tokens = normalized_tokens(node.text);
        let mut sorted = tokens.clone();
        sorted.sort_unstable();
        PreparedNode {
            kind: node.kind,
            tokens,
            sorted,
        }
    }
}

pub(crate) fn prepared_similarity(u: &PreparedNode, v: &PreparedNode, cfg: SimilarityKind) -> f64 {
    if cfg.kind_gate && u.kind != v.kind {
        return 0.0;
    }
    match (u.tokens.is_empty(), v.tokens.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    match cfg.measure {
        Measure::Exact => {
            if u.tokens == v.tokens {
                1.0
            } else {
                0.0
            }
        }
        Measure::TokenF1 => {
            let common = sorted_overlap(&u.sorted, &v.sorted);
            if common == 0 {
                0.0
            } else {
                // harmonic mean of precision c/|v| and recall c/|u|
                2.0 * common as f64 / (u.sorted.len() + v.sorted.len()) as f64
            }
        }
    }
}

fn sorted_overlap(a: &[String], b: &[String]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

/// Similarity of two nodes in `[0, 1]`: symmetric, and 1 for nodes whose
/// normalized texts agree.
pub fn node_similarity(u: NodeRef<'_>, v: NodeRef<'_>, cfg: SimilarityKind) -> f64 {
    prepared_similarity(&PreparedNode::new(u), &PreparedNode::new(v), cfg)
}
