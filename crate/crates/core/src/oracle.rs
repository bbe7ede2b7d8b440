//! Exhaustive reference implementations of the graph metric.
//!
//! Everything here enumerates: every order-preserving partial matching of two
//! paths, every injection of one path set into the other. Node similarity and
//! path enumeration are re-implemented locally so a defect in the fast code
//! cannot hide behind shared helpers. Only small inputs are accepted.

use std::collections::{BTreeMap, HashMap};

use crate::answer::em;
use crate::error::OracleError;
use crate::graph::{build_reasoning_graph, materialize_prediction};
use crate::ingest::{Dataset, PredictionSet};
use crate::model::{
    EvalCounts, EvalReport, Measure, NodeId, NodeKind, ReasoningGraph, SimilarityKind,
};

pub const MAX_ALIGN_LEN: usize = 8;
pub const MAX_ASSIGN_SIDE: usize = 7;
pub const MAX_PATHS: usize = 4;
pub const MAX_PATH_LEN: usize = 5;

/// Primary sums closer than this are treated as equal, as in the fast path.
const TIE_EPS: f64 = 1e-9;

fn too_large(what: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
    if size > limit {
        Err(OracleError::TooLarge { what, size, limit })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum CharClass {
    Ideograph,
    Word,
    Dot,
    Other,
}

fn classify(c: char) -> CharClass {
    let cp = c as u32;
    let ideograph = (0x3400..=0x4DBF).contains(&cp)
        || (0x4E00..=0x9FFF).contains(&cp)
        || (0xF900..=0xFAFF).contains(&cp)
        || (0x20000..=0x2A6DF).contains(&cp)
        || (0x2A700..=0x2EBEF).contains(&cp)
        || (0x30000..=0x3134F).contains(&cp);
    if ideograph {
        CharClass::Ideograph
    } else if c.is_alphanumeric() || c == '_' {
        CharClass::Word
    } else if c == '.' {
        CharClass::Dot
    } else {
        CharClass::Other
    }
}

fn oracle_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut buf = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let class = classify(c);
        let joins_number = class == CharClass::Dot
            && !buf.is_empty()
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
        if class == CharClass::Word || joins_number {
            buf.push(c);
            continue;
        }
        if !buf.is_empty() {
            tokens.push(std::mem::take(&mut buf).to_lowercase());
        }
        if class == CharClass::Ideograph {
            tokens.push(c.to_lowercase().collect());
        }
    }
    if !buf.is_empty() {
        tokens.push(buf.to_lowercase());
    }
    tokens
}

fn oracle_similarity(a: (NodeKind, &str), b: (NodeKind, &str), cfg: SimilarityKind) -> f64 {
    if cfg.kind_gate && a.0 != b.0 {
        return 0.0;
    }
    let (ta, tb) = (oracle_tokens(a.1), oracle_tokens(b.1));
    if ta.is_empty() || tb.is_empty() {
        return if ta.is_empty() && tb.is_empty() {
            1.0
        } else {
            0.0
        };
    }
    match cfg.measure {
        Measure::Exact => f64::from(u8::from(ta == tb)),
        Measure::TokenF1 => {
            let mut counts: HashMap<&str, i64> = HashMap::new();
            for t in &ta {
                *counts.entry(t).or_default() += 1;
            }
            let mut overlap = 0usize;
            for t in &tb {
                if let Some(c) = counts.get_mut(t.as_str()) {
                    if *c > 0 {
                        *c -= 1;
                        overlap += 1;
                    }
                }
            }
            if overlap == 0 {
                return 0.0;
            }
            let precision = overlap as f64 / tb.len() as f64;
            let recall = overlap as f64 / ta.len() as f64;
            2.0 * precision * recall / (precision + recall)
        }
    }
}

/// Best score over all order-preserving one-to-one partial matchings of the
/// similarity matrix, found by enumeration.
pub fn brute_force_alignment_scores(sim: &[Vec<f64>]) -> Result<f64, OracleError> {
    let n = sim.len();
    let m = sim.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(OracleError::EmptyPath);
    }
    too_large("path", n, MAX_ALIGN_LEN)?;
    too_large("path", m, MAX_ALIGN_LEN)?;

    // each p position is either skipped or matched to a q position after the last match
    fn go(sim: &[Vec<f64>], i: usize, next_j: usize, acc: f64, best: &mut f64) {
        if i == sim.len() {
            *best = best.max(acc);
            return;
        }
        go(sim, i + 1, next_j, acc, best);
        for j in next_j..sim[i].len() {
            go(sim, i + 1, j + 1, acc + sim[i][j], best);
        }
    }
    let mut best = 0.0f64;
    go(sim, 0, 0, 0.0, &mut best);
    Ok(best)
}

/// Enumerated best alignment of two node paths, given as (kind, text).
pub fn brute_force_alignment(
    p: &[(NodeKind, &str)],
    q: &[(NodeKind, &str)],
    cfg: SimilarityKind,
) -> Result<f64, OracleError> {
    if p.is_empty() || q.is_empty() {
        return Err(OracleError::EmptyPath);
    }
    too_large("path", p.len(), MAX_ALIGN_LEN)?;
    too_large("path", q.len(), MAX_ALIGN_LEN)?;
    let sim: Vec<Vec<f64>> = p
        .iter()
        .map(|&a| q.iter().map(|&b| oracle_similarity(a, b, cfg)).collect())
        .collect();
    brute_force_alignment_scores(&sim)
}

type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Calls `visit` with every maximal injection between rows and columns, as
/// `(row, col)` pairs sorted by row.
fn for_each_injection(rows: usize, cols: usize, visit: &mut Visit<'_>) {
    fn go(
        i: usize,
        small: usize,
        large: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        transpose: bool,
        visit: &mut Visit<'_>,
    ) {
        if i == small {
            let mut pairs: Vec<(usize, usize)> = chosen
                .iter()
                .enumerate()
                .map(|(s, &l)| if transpose { (l, s) } else { (s, l) })
                .collect();
            pairs.sort_unstable();
            visit(&pairs);
            return;
        }
        for l in 0..large {
            if !used[l] {
                used[l] = true;
                chosen.push(l);
                go(i + 1, small, large, used, chosen, transpose, visit);
                chosen.pop();
                used[l] = false;
            }
        }
    }
    let transpose = rows > cols;
    let (small, large) = if transpose {
        (cols, rows)
    } else {
        (rows, cols)
    };
    go(
        0,
        small,
        large,
        &mut vec![false; large],
        &mut Vec::new(),
        transpose,
        visit,
    );
}

/// Maximum total weight over all one-to-one matchings, by enumeration.
pub fn brute_force_assignment(matrix: &[Vec<f64>]) -> Result<f64, OracleError> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    too_large("assignment side", rows, MAX_ASSIGN_SIDE)?;
    too_large("assignment side", cols, MAX_ASSIGN_SIDE)?;
    let mut best = f64::NEG_INFINITY;
    for_each_injection(rows, cols, &mut |pairs| {
        let total = pairs.iter().fold(0.0, |acc, &(i, j)| acc + matrix[i][j]);
        best = best.max(total);
    });
    Ok(if best == f64::NEG_INFINITY { 0.0 } else { best })
}

fn oracle_paths(g: &ReasoningGraph) -> Result<Vec<Vec<NodeId>>, OracleError> {
    let mut evidence: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(src, dst) in g.edges() {
        evidence.entry(dst).or_default().push(src);
    }
    fn go(
        node: NodeId,
        evidence: &BTreeMap<NodeId, Vec<NodeId>>,
        path: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) -> Result<(), OracleError> {
        path.push(node);
        too_large("path length", path.len(), MAX_PATH_LEN)?;
        match evidence.get(&node) {
            None => {
                out.push(path.clone());
                too_large("path count", out.len(), MAX_PATHS)?;
            }
            Some(list) => {
                for &e in list {
                    go(e, evidence, path, out)?;
                }
            }
        }
        path.pop();
        Ok(())
    }
    let mut out = Vec::new();
    go(g.root(), &evidence, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Exhaustive DAG similarity: enumerated alignments for every path pair,
/// then every matching of the path sets, keeping the best `sum(L*S)` and,
/// among ties, the smallest normalizer.
pub fn brute_force_dagsim(
    g: &ReasoningGraph,
    h: &ReasoningGraph,
    cfg: SimilarityKind,
    exclude_root: bool,
) -> Result<f64, OracleError> {
    let strip = |paths: Vec<Vec<NodeId>>| -> Vec<Vec<NodeId>> {
        paths
            .into_iter()
            .map(|p| {
                if exclude_root && p.len() > 1 {
                    p[1..].to_vec()
                } else {
                    p
                }
            })
            .collect()
    };
    let gp = strip(oracle_paths(g)?);
    let hp = strip(oracle_paths(h)?);
    let view = |graph: &ReasoningGraph, path: &[NodeId]| -> Vec<(NodeKind, String)> {
        path.iter()
            .map(|n| (n.kind(), graph.text(*n).unwrap_or_default().to_string()))
            .collect()
    };
    let gv: Vec<_> = gp.iter().map(|p| view(g, p)).collect();
    let hv: Vec<_> = hp.iter().map(|p| view(h, p)).collect();

    let mut longer = vec![vec![0.0; hp.len()]; gp.len()];
    let mut shorter = vec![vec![0.0; hp.len()]; gp.len()];
    let mut score = vec![vec![0.0; hp.len()]; gp.len()];
    for i in 0..gp.len() {
        for j in 0..hp.len() {
            let a: Vec<(NodeKind, &str)> = gv[i].iter().map(|(k, t)| (*k, t.as_str())).collect();
            let b: Vec<(NodeKind, &str)> = hv[j].iter().map(|(k, t)| (*k, t.as_str())).collect();
            let raw = brute_force_alignment(&a, &b, cfg)?;
            longer[i][j] = a.len().max(b.len()) as f64;
            shorter[i][j] = a.len().min(b.len()) as f64;
            score[i][j] = raw / longer[i][j];
        }
    }

    let total_len: f64 = gp.iter().chain(&hp).map(|p| p.len() as f64).sum();
    let mut best: Option<(f64, f64, f64)> = None; // (primary, secondary, value)
    for_each_injection(gp.len(), hp.len(), &mut |pairs| {
        let primary = pairs
            .iter()
            .fold(0.0, |acc, &(i, j)| acc + longer[i][j] * score[i][j]);
        let secondary: f64 = pairs.iter().map(|&(i, j)| shorter[i][j]).sum();
        // matched pairs count L once; unmatched paths count their own length
        let normalizer = total_len - pairs.iter().map(|&(i, j)| shorter[i][j]).sum::<f64>();
        let value = primary / normalizer;
        let better = match best {
            None => true,
            Some((bp, bs, _)) => {
                primary > bp + TIE_EPS || (primary >= bp - TIE_EPS && secondary > bs)
            }
        };
        if better {
            best = Some((primary, secondary, value));
        }
    });
    Ok(best.map_or(0.0, |b| b.2))
}

/// Graph exact match by direct comparison of id sets.
pub fn brute_force_gem(g: &ReasoningGraph, h: &ReasoningGraph) -> bool {
    let ids = |x: &ReasoningGraph| x.nodes().keys().copied().collect::<Vec<_>>();
    let edges = |x: &ReasoningGraph| x.edges().iter().copied().collect::<Vec<_>>();
    g.root() == h.root() && ids(g) == ids(h) && edges(g) == edges(h)
}

/// End-to-end reference report: a plain sequential loop that scores every
/// question with [`brute_force_dagsim`] and [`brute_force_gem`].
pub fn reference_evaluate(
    ds: &Dataset,
    preds: &PredictionSet,
    cfg: SimilarityKind,
    exclude_root: bool,
) -> EvalReport {
    let mut counts = EvalCounts::default();
    let mut em_by_type: BTreeMap<String, usize> = BTreeMap::new();
    let mut em_by_turn: BTreeMap<u32, usize> = BTreeMap::new();
    let (mut em_total, mut gem_total, mut dag_total) = (0usize, 0usize, 0.0f64);
    let mut diagnostics = Vec::new();
    for ex in &ds.examples {
        for turn in &ex.turns {
            let ty = turn.answer_type.name().to_string();
            counts.overall += 1;
            *counts.per_type.entry(ty.clone()).or_default() += 1;
            *counts.per_turn.entry(turn.turn).or_default() += 1;
            em_by_type.entry(ty.clone()).or_default();
            em_by_turn.entry(turn.turn).or_default();
            let Some(pred) = preds.get(&ex.id, turn.turn) else {
                continue;
            };
            counts.predicted += 1;
            if em(&turn.gold_answer, &pred.answer, ex.language) {
                em_total += 1;
                *em_by_type.get_mut(&ty).unwrap() += 1;
                *em_by_turn.get_mut(&turn.turn).unwrap() += 1;
            }
            let gold = build_reasoning_graph(ex, turn.turn, None);
            let predicted = materialize_prediction(ex, turn.turn, &pred.edges);
            match (gold, predicted) {
                (Ok(g), Ok(h)) => {
                    gem_total += usize::from(brute_force_gem(&g, &h));
                    match brute_force_dagsim(&g, &h, cfg, exclude_root) {
                        Ok(v) => dag_total += v,
                        Err(e) => diagnostics.push(format!("{} turn {}: {e}", ex.id, turn.turn)),
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    diagnostics.push(format!("{} turn {}: {e}", ex.id, turn.turn))
                }
            }
        }
    }
    let pct = |hits: usize, n: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * hits as f64 / n as f64
        }
    };
    EvalReport {
        overall_em: pct(em_total, counts.overall),
        per_type_em: em_by_type
            .iter()
            .map(|(k, &h)| (k.clone(), pct(h, counts.per_type[k])))
            .collect(),
        per_turn_em: em_by_turn
            .iter()
            .map(|(k, &h)| (*k, pct(h, counts.per_turn[k])))
            .collect(),
        gem: pct(gem_total, counts.overall),
        dag_sim: if counts.overall == 0 {
            0.0
        } else {
            100.0 * dag_total / counts.overall as f64
        },
        counts,
        diagnostics,
    }
}
