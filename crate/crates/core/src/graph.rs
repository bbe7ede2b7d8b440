//! Reasoning-graph construction, candidate graphs, DAG validation and path
//! decomposition.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::GraphError;
use crate::model::{Example, NodeId, NodeKind, PathSet, ReasoningGraph};

pub const DEFAULT_PATH_CAP: usize = 4096;

/// Per-node first-order evidence replacing the annotated evidence of an
/// example. Nodes missing from the map have no evidence.
pub type EvidenceMap = BTreeMap<NodeId, Vec<NodeId>>;

/// Every chronologically legal evidence edge for one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateGraph {
    pub root: NodeId,
    pub candidate_edges: BTreeSet<(NodeId, NodeId)>,
}

impl CandidateGraph {
    pub fn contains(&self, edge: &(NodeId, NodeId)) -> bool {
        self.candidate_edges.contains(edge)
    }

    /// Candidate edges whose consumer is the root.
    pub fn root_edges(&self) -> impl Iterator<Item = &(NodeId, NodeId)> + '_ {
        self.candidate_edges
            .iter()
            .filter(|(_, dst)| *dst == self.root)
    }
}

fn check_turn(ex: &Example, t: u32) -> Result<(), GraphError> {
    if t == 0 || ex.turn(t).is_none() {
        return Err(GraphError::TurnOutOfRange {
            turn: t,
            turns: ex.turns.len(),
        });
    }
    Ok(())
}

/// Checks that `evidence` may support `consumer` inside `ex`.
fn check_evidence(ex: &Example, evidence: NodeId, consumer: NodeId) -> Result<(), GraphError> {
    match evidence.kind() {
        NodeKind::RootQuestion => Err(GraphError::Chronology { evidence, consumer }),
        NodeKind::QaTurn if evidence.index() >= consumer.index() => {
            Err(GraphError::Chronology { evidence, consumer })
        }
        _ if !ex.resolves(evidence) => Err(GraphError::Unresolved {
            node: evidence,
            consumer,
        }),
        _ => Ok(()),
    }
}

fn node_text(ex: &Example, node: NodeId) -> String {
    ex.node_text(node).unwrap_or_default()
}

/// Builds the reasoning graph of turn `t` by breadth-first search from the
/// question, following first-order evidence and stopping at segments.
///
/// With `evidence_override`, per-node evidence is read from the map instead
/// of the annotations; predicted graphs are materialized this way.
pub fn build_reasoning_graph(
    ex: &Example,
    t: u32,
    evidence_override: Option<&EvidenceMap>,
) -> Result<ReasoningGraph, GraphError> {
    check_turn(ex, t)?;
    let root = NodeId::root(t);
    let evidence_of = |node: NodeId| -> &[NodeId] {
        match evidence_override {
            Some(map) => map.get(&node).map(Vec::as_slice).unwrap_or(&[]),
            None => ex
                .turn(node.index())
                .map(|turn| turn.evidence.as_slice())
                .unwrap_or(&[]),
        }
    };

    let mut nodes = BTreeMap::new();
    let mut edges = BTreeSet::new();
    nodes.insert(root, node_text(ex, root));
    let mut queue = VecDeque::from([root]);
    while let Some(consumer) = queue.pop_front() {
        for &evidence in evidence_of(consumer) {
            check_evidence(ex, evidence, consumer)?;
            edges.insert((evidence, consumer));
            if let Entry::Vacant(slot) = nodes.entry(evidence) {
                slot.insert(node_text(ex, evidence));
                if evidence.kind() == NodeKind::QaTurn {
                    queue.push_back(evidence);
                }
            }
        }
    }
    Ok(ReasoningGraph::from_parts(root, nodes, edges))
}

/// Materializes a predicted edge list for turn `t` and validates it.
///
/// Node texts come from the example. Every endpoint must be a segment, an
/// earlier turn, or the root `q:t`, and the result must pass
/// [`validate_dag`].
pub fn materialize_prediction(
    ex: &Example,
    t: u32,
    edges: &[(NodeId, NodeId)],
) -> Result<ReasoningGraph, GraphError> {
    check_turn(ex, t)?;
    let root = NodeId::root(t);
    let mut nodes = BTreeMap::new();
    nodes.insert(root, node_text(ex, root));
    let mut edge_set = BTreeSet::new();
    for &(src, dst) in edges {
        match dst.kind() {
            NodeKind::Segment => return Err(GraphError::SegmentWithEvidence(dst)),
            NodeKind::RootQuestion if dst != root => {
                return Err(GraphError::MultipleRoots(vec![root, dst]))
            }
            NodeKind::QaTurn if dst.index() >= t || !ex.resolves(dst) => {
                return Err(GraphError::Chronology {
                    evidence: dst,
                    consumer: root,
                })
            }
            _ => {}
        }
        check_evidence(ex, src, dst)?;
        for n in [src, dst] {
            nodes.entry(n).or_insert_with(|| node_text(ex, n));
        }
        edge_set.insert((src, dst));
    }
    let graph = ReasoningGraph::from_parts(root, nodes, edge_set);
    validate_dag(&graph)?;
    Ok(graph)
}

/// Candidate graph for turn `t`: every segment and every earlier turn linked
/// to every later turn up to and including the question.
pub fn build_candidate_graph(ex: &Example, t: u32) -> CandidateGraph {
    let root = NodeId::root(t);
    let consumers: Vec<NodeId> = (1..t).map(NodeId::qa).chain([root]).collect();
    let mut candidate_edges = BTreeSet::new();
    for k in 1..=ex.segments.len() as u32 {
        for &c in &consumers {
            candidate_edges.insert((NodeId::segment(k), c));
        }
    }
    for r in 1..t {
        for &c in &consumers {
            if c.kind() == NodeKind::RootQuestion || c.index() > r {
                candidate_edges.insert((NodeId::qa(r), c));
            }
        }
    }
    CandidateGraph {
        root,
        candidate_edges,
    }
}

/// Verifies the reasoning-graph invariants: one question root with no
/// consumers, all endpoints present, no cycles, segments without evidence,
/// and every node reaching the root.
pub fn validate_dag(g: &ReasoningGraph) -> Result<(), GraphError> {
    let root = g.root();
    if root.kind() != NodeKind::RootQuestion || !g.nodes().contains_key(&root) {
        return Err(GraphError::BadRoot(root));
    }
    for &(a, b) in g.edges() {
        for n in [a, b] {
            if !g.nodes().contains_key(&n) {
                return Err(GraphError::MissingEndpoint(n));
            }
        }
    }
    let roots: Vec<NodeId> = g
        .nodes()
        .keys()
        .copied()
        .filter(|n| n.kind() == NodeKind::RootQuestion)
        .collect();
    if roots.len() > 1 {
        return Err(GraphError::MultipleRoots(roots));
    }
    if let Some(cycle) = find_cycle(g) {
        return Err(GraphError::Cycle(cycle));
    }
    if g.edges().iter().any(|(src, _)| *src == root) {
        return Err(GraphError::RootHasConsumers(root));
    }
    if let Some(&(_, seg)) = g
        .edges()
        .iter()
        .find(|(_, dst)| dst.kind() == NodeKind::Segment)
    {
        return Err(GraphError::SegmentWithEvidence(seg));
    }

    let reverse = evidence_lists(g);
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        for &e in reverse.get(&n).into_iter().flatten() {
            if seen.insert(e) {
                stack.push(e);
            }
        }
    }
    if let Some(orphan) = g.nodes().keys().find(|n| !seen.contains(n)) {
        return Err(GraphError::Orphan(*orphan));
    }
    Ok(())
}

/// consumer -> sorted evidence
fn evidence_lists(g: &ReasoningGraph) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut map: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    // edges are sorted by source, so each list comes out sorted
    for &(src, dst) in g.edges() {
        map.entry(dst).or_default().push(src);
    }
    map
}

fn find_cycle(g: &ReasoningGraph) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut forward: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(src, dst) in g.edges() {
        forward.entry(src).or_default().push(dst);
    }
    let mut marks: HashMap<NodeId, Mark> = HashMap::new();
    for &start in forward.keys() {
        if marks.contains_key(&start) {
            continue;
        }
        // iterative DFS keeping the current path on `trail`
        let mut trail: Vec<(NodeId, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Open);
        while let Some(&mut (node, ref mut next)) = trail.last_mut() {
            let succ = forward.get(&node).map(Vec::as_slice).unwrap_or(&[]);
            if *next < succ.len() {
                let s = succ[*next];
                *next += 1;
                match marks.get(&s) {
                    Some(Mark::Open) => {
                        let from = trail.iter().position(|(n, _)| *n == s).unwrap_or(0);
                        let mut cycle: Vec<NodeId> =
                            trail[from..].iter().map(|(n, _)| *n).collect();
                        cycle.push(s);
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(s, Mark::Open);
                        trail.push((s, 0));
                    }
                }
            } else {
                marks.insert(node, Mark::Done);
                trail.pop();
            }
        }
    }
    None
}

/// Number of root-to-source paths, saturating. Assumes a valid DAG.
pub fn count_paths(g: &ReasoningGraph) -> u128 {
    let reverse = evidence_lists(g);
    let mut memo: HashMap<NodeId, u128> = HashMap::new();
    fn visit(
        n: NodeId,
        reverse: &BTreeMap<NodeId, Vec<NodeId>>,
        memo: &mut HashMap<NodeId, u128>,
    ) -> u128 {
        if let Some(&c) = memo.get(&n) {
            return c;
        }
        // provisional entry so a stray cycle terminates instead of recursing forever
        memo.insert(n, 0);
        let c = match reverse.get(&n) {
            None => 1,
            Some(ev) => ev
                .iter()
                .fold(0u128, |acc, &e| acc.saturating_add(visit(e, reverse, memo))),
        };
        memo.insert(n, c);
        c
    }
    visit(g.root(), &reverse, &mut memo)
}

/// Decomposes a valid graph into its root-to-source paths, root first, in
/// lexicographic node order. Fails when the path count exceeds `cap`.
pub fn decompose_paths(g: &ReasoningGraph, cap: usize) -> Result<PathSet, GraphError> {
    let count = count_paths(g);
    if count > cap as u128 {
        return Err(GraphError::PathExplosion { count, cap });
    }
    let reverse = evidence_lists(g);
    let mut paths = Vec::with_capacity(count as usize);
    let mut current = vec![g.root()];
    walk(&reverse, &mut current, &mut paths);
    Ok(PathSet { paths })
}

fn walk(
    reverse: &BTreeMap<NodeId, Vec<NodeId>>,
    current: &mut Vec<NodeId>,
    out: &mut Vec<Vec<NodeId>>,
) {
    let last = *current.last().expect("path never empty");
    match reverse.get(&last) {
        None => out.push(current.clone()),
        Some(evidence) => {
            for &e in evidence {
                current.push(e);
                walk(reverse, current, out);
                current.pop();
            }
        }
    }
}
