//! Graph similarity: node similarity, order-preserving path alignment, the
//! score matrix, optimal path matching, the frequency-weighted DAG
//! similarity and graph exact match.

mod align;
mod assignment;
mod similarity;

use std::collections::HashMap;

use serde::Serialize;

pub use align::{align_paths, align_scores};
pub use assignment::solve_assignment;
pub use similarity::{node_similarity, NodeRef};

use crate::error::SimError;
use crate::graph::{decompose_paths, validate_dag, DEFAULT_PATH_CAP};
use crate::model::{Matching, NodeId, PathSet, ReasoningGraph, ScoreMatrix, SimilarityKind};
use similarity::PreparedNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DagSimConfig {
    pub similarity: SimilarityKind,
    /// Drop the question node from every path before alignment. A path
    /// holding only the root keeps it.
    pub exclude_root: bool,
    pub path_cap: usize,
}

impl Default for DagSimConfig {
    fn default() -> Self {
        DagSimConfig {
            similarity: SimilarityKind::default(),
            exclude_root: false,
            path_cap: DEFAULT_PATH_CAP,
        }
    }
}

impl From<SimilarityKind> for DagSimConfig {
    fn from(similarity: SimilarityKind) -> Self {
        DagSimConfig {
            similarity,
            ..Default::default()
        }
    }
}

/// Everything computed on the way to one DAG similarity value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DagSimBreakdown {
    pub value: f64,
    pub gold_paths: PathSet,
    pub pred_paths: PathSet,
    pub scores: ScoreMatrix,
    /// Pairs carry `weight = L / N` and `score = S`.
    pub matching: Matching,
    /// Sum of matched `L` plus the lengths of unmatched paths.
    pub normalizer: f64,
}

fn strip_root(paths: &PathSet, exclude_root: bool) -> Vec<Vec<NodeId>> {
    paths
        .paths
        .iter()
        .map(|p| {
            if exclude_root && p.len() > 1 {
                p[1..].to_vec()
            } else {
                p.clone()
            }
        })
        .collect()
}

struct PreparedGraph {
    nodes: HashMap<NodeId, PreparedNode>,
}

impl PreparedGraph {
    fn new(g: &ReasoningGraph) -> Self {
        let nodes = g
            .nodes()
            .iter()
            .map(|(id, text)| (*id, PreparedNode::new(NodeRef::new(id.kind(), text))))
            .collect();
        PreparedGraph { nodes }
    }

    fn path<'a>(&'a self, path: &[NodeId]) -> Vec<&'a PreparedNode> {
        path.iter().map(|n| &self.nodes[n]).collect()
    }
}

fn matrix_between(
    g: &ReasoningGraph,
    gp: &[Vec<NodeId>],
    h: &ReasoningGraph,
    hp: &[Vec<NodeId>],
    cfg: SimilarityKind,
) -> Result<ScoreMatrix, SimError> {
    let (pg, ph) = (PreparedGraph::new(g), PreparedGraph::new(h));
    let rows: Vec<Vec<&PreparedNode>> = gp.iter().map(|p| pg.path(p)).collect();
    let cols: Vec<Vec<&PreparedNode>> = hp.iter().map(|p| ph.path(p)).collect();
    let entries = rows
        .iter()
        .map(|p| {
            cols.iter()
                .map(|q| align::align_prepared(p, q, cfg).map(|r| r.normalized_score))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScoreMatrix {
        rows: gp.len(),
        cols: hp.len(),
        entries,
    })
}

/// Normalized best-alignment score of every (gold path, predicted path)
/// pair. Node texts are looked up in the owning graphs.
pub fn score_matrix(
    g: &ReasoningGraph,
    gold: &PathSet,
    h: &ReasoningGraph,
    pred: &PathSet,
    cfg: SimilarityKind,
) -> Result<ScoreMatrix, SimError> {
    if gold.is_empty() || pred.is_empty() {
        return Err(SimError::EmptyPath);
    }
    matrix_between(g, &gold.paths, h, &pred.paths, cfg)
}

/// DAG similarity of gold graph `g` and predicted graph `h`, in `[0, 1]`.
pub fn dag_sim(
    g: &ReasoningGraph,
    h: &ReasoningGraph,
    cfg: &DagSimConfig,
) -> Result<f64, SimError> {
    dag_sim_detailed(g, h, cfg).map(|b| b.value)
}

/// Like [`dag_sim`] but keeps the paths, matrix and matching.
///
/// With `L(i,j) = max(|p_i|, |q_j|)` and normalized scores `S`, the matching
/// maximizes the sum of `L*S`; among matchings within 1e-9 of that optimum
/// it picks one with the smallest normalizer `N`, which is the same as the
/// largest sum of `min(|p_i|, |q_j|)`. The value is `sum(L*S) / N`, where
/// unmatched paths add their length to `N`.
pub fn dag_sim_detailed(
    g: &ReasoningGraph,
    h: &ReasoningGraph,
    cfg: &DagSimConfig,
) -> Result<DagSimBreakdown, SimError> {
    validate_dag(g)?;
    validate_dag(h)?;
    let gold_paths = decompose_paths(g, cfg.path_cap)?;
    let pred_paths = decompose_paths(h, cfg.path_cap)?;
    let gp = strip_root(&gold_paths, cfg.exclude_root);
    let hp = strip_root(&pred_paths, cfg.exclude_root);
    let scores = matrix_between(g, &gp, h, &hp, cfg.similarity)?;

    let longer = |i: usize, j: usize| gp[i].len().max(hp[j].len()) as f64;
    let shorter = |i: usize, j: usize| gp[i].len().min(hp[j].len()) as f64;
    let primary: Vec<Vec<f64>> = (0..gp.len())
        .map(|i| {
            (0..hp.len())
                .map(|j| longer(i, j) * scores.get(i, j))
                .collect()
        })
        .collect();
    let secondary: Vec<Vec<f64>> = (0..gp.len())
        .map(|i| (0..hp.len()).map(|j| shorter(i, j)).collect())
        .collect();
    let pairs = assignment::solve_lex(&primary, &secondary);

    let mut matched_rows = vec![false; gp.len()];
    let mut matched_cols = vec![false; hp.len()];
    let mut normalizer = 0.0;
    for &(i, j) in &pairs {
        matched_rows[i] = true;
        matched_cols[j] = true;
        normalizer += longer(i, j);
    }
    normalizer += gp
        .iter()
        .zip(&matched_rows)
        .filter(|(_, m)| !**m)
        .map(|(p, _)| p.len() as f64)
        .sum::<f64>();
    normalizer += hp
        .iter()
        .zip(&matched_cols)
        .filter(|(_, m)| !**m)
        .map(|(p, _)| p.len() as f64)
        .sum::<f64>();

    let matching = assignment::build_matching(&pairs, gp.len(), hp.len(), |i, j| {
        (longer(i, j) / normalizer, scores.get(i, j))
    });
    let numerator = pairs
        .iter()
        .fold(0.0, |acc, &(i, j)| acc + longer(i, j) * scores.get(i, j));
    Ok(DagSimBreakdown {
        value: numerator / normalizer,
        gold_paths,
        pred_paths,
        scores,
        matching,
        normalizer,
    })
}

/// Graph exact match: same root, node ids and edges. Texts are ignored.
pub fn gem(g: &ReasoningGraph, h: &ReasoningGraph) -> bool {
    g.root() == h.root() && g.nodes().keys().eq(h.nodes().keys()) && g.edges() == h.edges()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Measure, NodeKind};
    use std::collections::{BTreeMap, BTreeSet};

    const EXACT: SimilarityKind = SimilarityKind {
        measure: Measure::Exact,
        kind_gate: false,
    };

    fn graph(root: &str, nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> ReasoningGraph {
        let nodes: BTreeMap<NodeId, String> = nodes
            .iter()
            .map(|(id, t)| (id.parse().unwrap(), t.to_string()))
            .collect();
        let edges: BTreeSet<(NodeId, NodeId)> = edges
            .iter()
            .map(|(a, b)| (a.parse().unwrap(), b.parse().unwrap()))
            .collect();
        ReasoningGraph::from_parts(root.parse().unwrap(), nodes, edges)
    }

    /// Two lines of reasoning, R <- X <- S1 and R <- Y <- S2.
    fn two_lines() -> ReasoningGraph {
        graph(
            "q:3",
            &[
                ("q:3", "R"),
                ("qa:1", "X"),
                ("qa:2", "Y"),
                ("seg:1", "S1"),
                ("seg:2", "S2"),
            ],
            &[
                ("qa:1", "q:3"),
                ("qa:2", "q:3"),
                ("seg:1", "qa:1"),
                ("seg:2", "qa:2"),
            ],
        )
    }

    fn one_line() -> ReasoningGraph {
        graph(
            "q:3",
            &[("q:3", "R"), ("qa:1", "X"), ("seg:1", "S1")],
            &[("qa:1", "q:3"), ("seg:1", "qa:1")],
        )
    }

    #[test]
    fn missing_line_halves_the_score() {
        let cfg = DagSimConfig::from(EXACT);
        let b = dag_sim_detailed(&two_lines(), &one_line(), &cfg).unwrap();
        // matched pair L=3 with S=1, unmatched gold path of length 3
        assert_eq!(b.value, 0.5);
        assert_eq!(b.normalizer, 6.0);
        assert_eq!(b.scores.entries[0][0], 1.0);
        assert!((b.scores.entries[1][0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.matching.unmatched_gt, [1]);
        assert_eq!(dag_sim(&one_line(), &two_lines(), &cfg).unwrap(), 0.5);
    }

    #[test]
    fn self_similarity_is_one() {
        for cfg in [DagSimConfig::from(EXACT), DagSimConfig::default()] {
            assert_eq!(dag_sim(&two_lines(), &two_lines(), &cfg).unwrap(), 1.0);
        }
        let root_only = ReasoningGraph::root_only(NodeId::root(1), "what brand?");
        assert_eq!(
            dag_sim(&root_only, &root_only, &DagSimConfig::default()).unwrap(),
            1.0
        );
        assert!(gem(&root_only, &root_only));
    }

    #[test]
    fn disjoint_texts_score_zero() {
        let g = graph(
            "q:1",
            &[("q:1", "alpha"), ("seg:1", "beta")],
            &[("seg:1", "q:1")],
        );
        let h = graph(
            "q:1",
            &[("q:1", "gamma"), ("seg:2", "delta")],
            &[("seg:2", "q:1")],
        );
        assert_eq!(dag_sim(&g, &h, &DagSimConfig::from(EXACT)).unwrap(), 0.0);
    }

    #[test]
    fn exclude_root() {
        let cfg = DagSimConfig {
            exclude_root: true,
            ..DagSimConfig::from(EXACT)
        };
        let b = dag_sim_detailed(&two_lines(), &one_line(), &cfg).unwrap();
        // paths of length 2: matched L=2, unmatched 2
        assert_eq!(b.normalizer, 4.0);
        assert_eq!(b.value, 0.5);
    }

    #[test]
    fn weights_sum_to_one() {
        let b = dag_sim_detailed(&two_lines(), &one_line(), &DagSimConfig::from(EXACT)).unwrap();
        let unmatched: f64 = b
            .matching
            .unmatched_gt
            .iter()
            .map(|&i| b.gold_paths.paths[i].len() as f64 / b.normalizer)
            .sum();
        assert!((b.matching.total_weight() + unmatched - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_graphs_are_rejected() {
        let bad = graph("q:1", &[("q:1", "x")], &[("seg:1", "q:1")]);
        assert!(dag_sim(&bad, &one_line(), &DagSimConfig::default()).is_err());
    }

    #[test]
    fn gem_compares_ids_not_texts() {
        let g = two_lines();
        let mut retexted = g.relabel(|n| n);
        retexted = ReasoningGraph::from_parts(
            retexted.root(),
            retexted
                .nodes()
                .keys()
                .map(|k| (*k, "other".to_string()))
                .collect(),
            retexted.edges().clone(),
        );
        assert!(gem(&g, &retexted));
        let mut edges = g.edges().clone();
        edges.insert((NodeId::segment(1), NodeId::root(3)));
        let extra = ReasoningGraph::from_parts(g.root(), g.nodes().clone(), edges);
        assert!(!gem(&g, &extra));
    }

    #[test]
    fn relabeling_keeps_the_score() {
        let cfg = DagSimConfig::default();
        let g = two_lines();
        let h = one_line();
        let shifted = h.relabel(|n| match n.kind() {
            NodeKind::Segment => NodeId::segment(n.index() + 5),
            _ => n,
        });
        assert_eq!(
            dag_sim(&g, &h, &cfg).unwrap(),
            dag_sim(&g, &shifted, &cfg).unwrap()
        );
        assert!(!gem(&h, &shifted));
    }

    #[test]
    fn score_matrix_of_identical_single_paths() {
        let g = one_line();
        let p = decompose_paths(&g, 8).unwrap();
        let m = score_matrix(&g, &p, &g, &p, EXACT).unwrap();
        assert_eq!(m.entries, vec![vec![1.0]]);
    }
}
