//! Maximum-weight bipartite assignment (Hungarian algorithm).
//!
//! The solver runs on a square matrix: rectangular inputs are padded with
//! zero weights and padded pairs are dropped from the result. Costs are an
//! abstract ordered group so the same routine handles plain weights and the
//! lexicographic (weight, tie-break) pairs used by the graph metric.

use crate::error::SimError;
use crate::model::{MatchedPair, Matching};

pub(crate) trait Cost: Copy {
    const ZERO: Self;
    const INF: Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn less(self, other: Self) -> bool;
}

impl Cost for f64 {
    const ZERO: Self = 0.0;
    const INF: Self = f64::INFINITY;
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn less(self, other: Self) -> bool {
        self < other
    }
}

/// Primary cost, then secondary cost. Primaries within `LEX_EPS` count as equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LexCost {
    pub primary: f64,
    pub secondary: f64,
}

pub(crate) const LEX_EPS: f64 = 1e-9;

impl Cost for LexCost {
    const ZERO: Self = LexCost {
        primary: 0.0,
        secondary: 0.0,
    };
    const INF: Self = LexCost {
        primary: f64::INFINITY,
        secondary: 0.0,
    };
    fn add(self, o: Self) -> Self {
        LexCost {
            primary: self.primary + o.primary,
            secondary: self.secondary + o.secondary,
        }
    }
    fn sub(self, o: Self) -> Self {
        LexCost {
            primary: self.primary - o.primary,
            secondary: self.secondary - o.secondary,
        }
    }
    fn less(self, o: Self) -> bool {
        let d = self.primary - o.primary;
        if d < -LEX_EPS {
            true
        } else if d > LEX_EPS || d.is_nan() {
            false
        } else {
            self.secondary < o.secondary
        }
    }
}

/// Minimum-cost perfect assignment of an `n x n` matrix; returns the column
/// of each row. Classic potentials formulation, O(n^3).
pub(crate) fn hungarian_min<C: Cost>(cost: &[Vec<C>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let mut u = vec![C::ZERO; n + 1];
    let mut v = vec![C::ZERO; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![C::INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = C::INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1].sub(u[i0]).sub(v[j]);
                if cur.less(minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if j1 == 0 || minv[j].less(delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].add(delta);
                    v[j] = v[j].sub(delta);
                } else {
                    minv[j] = minv[j].sub(delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

pub(crate) fn check_matrix(weights: &[Vec<f64>]) -> Result<(usize, usize), SimError> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if weights.iter().any(|r| r.len() != cols) {
        return Err(SimError::Ragged);
    }
    for (i, row) in weights.iter().enumerate() {
        if let Some(j) = row.iter().position(|w| !w.is_finite()) {
            return Err(SimError::NaN(i, j));
        }
    }
    Ok((rows, cols))
}

/// Maximizes `primary`, then `secondary`, over one-to-one matchings of size
/// `min(rows, cols)`. Returns `(row, col)` pairs sorted by row.
pub(crate) fn solve_lex(primary: &[Vec<f64>], secondary: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = primary.len();
    let cols = primary.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    let cost: Vec<Vec<LexCost>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < rows && j < cols {
                        LexCost {
                            primary: -primary[i][j],
                            secondary: -secondary[i][j],
                        }
                    } else {
                        LexCost::ZERO
                    }
                })
                .collect()
        })
        .collect();
    real_pairs(hungarian_min(&cost), rows, cols)
}

fn real_pairs(assignment: Vec<usize>, rows: usize, cols: usize) -> Vec<(usize, usize)> {
    assignment
        .into_iter()
        .enumerate()
        .filter(|&(i, j)| i < rows && j < cols)
        .collect()
}

/// Maximum-weight one-to-one matching of size `min(rows, cols)`.
///
/// Each returned pair carries its matrix entry as `weight` and a `score` of
/// 1, so [`Matching::total_weight`] is the objective. Ties resolve
/// deterministically by scan order.
pub fn solve_assignment(weights: &[Vec<f64>]) -> Result<Matching, SimError> {
    let (rows, cols) = check_matrix(weights)?;
    let n = rows.max(cols);
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < rows && j < cols {
                        -weights[i][j]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let pairs = real_pairs(hungarian_min(&cost), rows, cols);
    Ok(build_matching(&pairs, rows, cols, |i, j| {
        (weights[i][j], 1.0)
    }))
}

pub(crate) fn build_matching(
    pairs: &[(usize, usize)],
    rows: usize,
    cols: usize,
    mut weigh: impl FnMut(usize, usize) -> (f64, f64),
) -> Matching {
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let pairs = pairs
        .iter()
        .map(|&(row, col)| {
            row_used[row] = true;
            col_used[col] = true;
            let (weight, score) = weigh(row, col);
            MatchedPair {
                row,
                col,
                weight,
                score,
            }
        })
        .collect();
    Matching {
        pairs,
        unmatched_gt: (0..rows).filter(|&i| !row_used[i]).collect(),
        unmatched_pred: (0..cols).filter(|&j| !col_used[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(m: &Matching) -> Vec<(usize, usize)> {
        m.pairs.iter().map(|p| (p.row, p.col)).collect()
    }

    #[test]
    fn identity() {
        let w = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let m = solve_assignment(&w).unwrap();
        assert_eq!(pairs(&m), [(0, 0), (1, 1), (2, 2)]);
        assert_eq!(m.total_weight(), 3.0);
    }

    #[test]
    fn two_by_two() {
        // permutations: 1 + 5 = 6 and 2 + 3 = 5
        let m = solve_assignment(&[vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(pairs(&m), [(0, 0), (1, 1)]);
        assert_eq!(m.total_weight(), 6.0);
    }

    #[test]
    fn rectangular() {
        let m = solve_assignment(&[vec![0.2], vec![0.9], vec![0.5]]).unwrap();
        assert_eq!(pairs(&m), [(1, 0)]);
        assert_eq!(m.unmatched_gt, [0, 2]);
        assert!(m.unmatched_pred.is_empty());

        let m = solve_assignment(&[vec![0.1, 0.7, 0.3]]).unwrap();
        assert_eq!(pairs(&m), [(0, 1)]);
        assert_eq!(m.unmatched_pred, [0, 2]);
    }

    #[test]
    fn rejects_nan_and_ragged() {
        assert_eq!(
            solve_assignment(&[vec![0.0, f64::NAN]]),
            Err(SimError::NaN(0, 1))
        );
        assert_eq!(
            solve_assignment(&[vec![0.0, 1.0], vec![0.0]]),
            Err(SimError::Ragged)
        );
        assert!(solve_assignment(&[]).unwrap().pairs.is_empty());
    }

    #[test]
    fn lexicographic_tie_break() {
        // both diagonals score 2 on the primary; the secondary picks the anti-diagonal
        let primary = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let secondary = vec![vec![0.0, 3.0], vec![2.0, 0.0]];
        assert_eq!(solve_lex(&primary, &secondary), [(0, 1), (1, 0)]);
        // primary still dominates
        let primary = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(solve_lex(&primary, &secondary), [(0, 0), (1, 1)]);
    }

    #[test]
    fn deterministic_on_ties() {
        let w = vec![vec![0.5; 4]; 4];
        let a = solve_assignment(&w).unwrap();
        let b = solve_assignment(&w).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs.len(), 4);
    }
}
