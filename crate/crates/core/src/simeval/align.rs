use crate::error::SimError;
use crate::model::{AlignmentResult, SimilarityKind};

use super::similarity::{prepared_similarity, NodeRef, PreparedNode};

/// Best order-preserving alignment given the pairwise similarity matrix
/// `sim[i][j] = a(p_i, q_j)`.
///
/// `f[i][j] = max(f[i-1][j], f[i][j-1], f[i-1][j-1] + sim[i-1][j-1])`. The
/// traceback prefers the diagonal, then advancing along the first path.
pub fn align_scores(sim: &[Vec<f64>]) -> Result<AlignmentResult, SimError> {
    let n = sim.len();
    let m = sim.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(SimError::EmptyPath);
    }
    if sim.iter().any(|row| row.len() != m) {
        return Err(SimError::Ragged);
    }

    let mut f = vec![vec![0.0f64; m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let diag = f[i - 1][j - 1] + sim[i - 1][j - 1];
            f[i][j] = diag.max(f[i - 1][j]).max(f[i][j - 1]);
        }
    }

    let mut matched_pairs = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        if f[i][j] == f[i - 1][j - 1] + sim[i - 1][j - 1] {
            matched_pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if f[i][j] == f[i - 1][j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    matched_pairs.reverse();

    let raw_score = f[n][m];
    Ok(AlignmentResult {
        raw_score,
        normalized_score: raw_score / n.max(m) as f64,
        matched_pairs,
    })
}

pub(crate) fn align_prepared(
    p: &[&PreparedNode],
    q: &[&PreparedNode],
    cfg: SimilarityKind,
) -> Result<AlignmentResult, SimError> {
    let sim: Vec<Vec<f64>> = p
        .iter()
        .map(|u| q.iter().map(|v| prepared_similarity(u, v, cfg)).collect())
        .collect();
    align_scores(&sim)
}

/// Chronology-preserving alignment of two root-first node sequences.
pub fn align_paths(
    p: &[NodeRef<'_>],
    q: &[NodeRef<'_>],
    cfg: SimilarityKind,
) -> Result<AlignmentResult, SimError> {
    if p.is_empty() || q.is_empty() {
        return Err(SimError::EmptyPath);
    }
    let p: Vec<PreparedNode> = p.iter().map(|n| PreparedNode::new(*n)).collect();
    let q: Vec<PreparedNode> = q.iter().map(|n| PreparedNode::new(*n)).collect();
    align_prepared(
        &p.iter().collect::<Vec<_>>(),
        &q.iter().collect::<Vec<_>>(),
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Measure, NodeKind};

    const EXACT: SimilarityKind = SimilarityKind {
        measure: Measure::Exact,
        kind_gate: false,
    };

    fn nodes<'a>(texts: &[&'a str]) -> Vec<NodeRef<'a>> {
        texts
            .iter()
            .map(|t| NodeRef::new(NodeKind::QaTurn, t))
            .collect()
    }

    #[test]
    fn identical_paths() {
        let p = nodes(&["A", "B", "C"]);
        let r = align_paths(&p, &p, EXACT).unwrap();
        assert_eq!(r.raw_score, 3.0);
        assert_eq!(r.normalized_score, 1.0);
        assert_eq!(r.matched_pairs, [(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn shorter_suffix() {
        let r = align_paths(&nodes(&["A", "B", "C"]), &nodes(&["B", "C"]), EXACT).unwrap();
        assert_eq!(r.raw_score, 2.0);
        assert!((r.normalized_score - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.matched_pairs, [(1, 0), (2, 1)]);
    }

    #[test]
    fn crossing_matches_are_forbidden() {
        let r = align_paths(&nodes(&["A", "B"]), &nodes(&["B", "A"]), EXACT).unwrap();
        assert_eq!(r.raw_score, 1.0);
        assert_eq!(r.normalized_score, 0.5);
        assert_eq!(r.matched_pairs.len(), 1);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(
            align_paths(&[], &nodes(&["A"]), EXACT),
            Err(SimError::EmptyPath)
        );
        assert_eq!(align_scores(&[]), Err(SimError::EmptyPath));
    }

    #[test]
    fn traceback_prefers_diagonal_then_first_path() {
        // all zero: the diagonal ties every time
        let r = align_scores(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(r.matched_pairs, [(0, 0), (1, 1)]);
        // one row, max at the left: advance along q first
        let r = align_scores(&[vec![1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(r.matched_pairs, [(0, 0)]);
    }

    proptest::proptest! {
        #[test]
        fn bounded_monotone_and_consistent(
            sim in proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, 1..6), 1..6),
            bump in 0.0f64..1.0,
            at in (0usize..6, 0usize..6),
        ) {
            let m = sim[0].len();
            let sim: Vec<Vec<f64>> = sim.into_iter().map(|mut r| { r.resize(m, 0.5); r }).collect();
            let r = align_scores(&sim).unwrap();
            proptest::prop_assert!(r.raw_score <= sim.len().min(m) as f64 + 1e-12);
            // matched pairs realise the score and are strictly increasing
            let realised: f64 = r.matched_pairs.iter().map(|&(i, j)| sim[i][j]).sum();
            proptest::prop_assert!((realised - r.raw_score).abs() < 1e-9);
            for w in r.matched_pairs.windows(2) {
                proptest::prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            let mut bumped = sim.clone();
            let (i, j) = (at.0 % sim.len(), at.1 % m);
            bumped[i][j] = (bumped[i][j] + bump).min(1.0);
            proptest::prop_assert!(align_scores(&bumped).unwrap().raw_score >= r.raw_score);
        }
    }
}
