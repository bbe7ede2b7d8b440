//! Deterministic heuristic predictors.
//!
//! Randomness comes from SplitMix64. Each question gets its own stream,
//! seeded from the user seed, an FNV-1a hash of the example id and the turn
//! number, so output does not depend on scheduling or iteration order.

use std::fmt;
use std::str::FromStr;

use crate::error::BaselineError;
use crate::exec::{self, Exec};
use crate::graph::{build_candidate_graph, build_reasoning_graph};
use crate::ingest::{Dataset, Prediction, PredictionSet};
use crate::model::{Example, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Gold answers and gold graphs: the upper bound.
    GoldEcho,
    /// Previous turn's answer, citing only that turn (the last segment at turn 1).
    NearestEvidence,
    /// A uniformly random non-empty set of candidate edges into the question.
    RandomGraph,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::GoldEcho => "gold-echo",
            Strategy::NearestEvidence => "nearest-evidence",
            Strategy::RandomGraph => "random-graph",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold-echo" => Ok(Strategy::GoldEcho),
            "nearest-evidence" => Ok(Strategy::NearestEvidence),
            "random-graph" => Ok(Strategy::RandomGraph),
            other => Err(BaselineError::UnknownStrategy(other.to_string())),
        }
    }
}

/// SplitMix64 (Steele, Lea and Flood): a 64-bit counter passed through a
/// fixed mixing function.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` by rejection, `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3)
    })
}

/// Stream for one question: `seed`, then the id hash, then the turn, each
/// folded in through one SplitMix64 step.
pub fn question_stream(seed: u64, example_id: &str, turn: u32) -> SplitMix64 {
    let a = SplitMix64::new(seed).next_u64();
    let b = SplitMix64::new(a ^ fnv1a(example_id.as_bytes())).next_u64();
    SplitMix64::new(b ^ u64::from(turn))
}

const SPECIAL_ANSWERS: [&str; 3] = ["Yes", "No", "Do not know"];

fn predict_example(
    ex: &Example,
    strategy: Strategy,
    seed: u64,
) -> Vec<((String, u32), Prediction)> {
    ex.turns
        .iter()
        .map(|turn| {
            let t = turn.turn;
            let root = NodeId::root(t);
            let prediction = match strategy {
                Strategy::GoldEcho => Prediction {
                    answer: turn.gold_answer.clone(),
                    edges: build_reasoning_graph(ex, t, None)
                        .map(|g| g.edges().iter().copied().collect())
                        .unwrap_or_default(),
                },
                Strategy::NearestEvidence => match ex.turn(t.saturating_sub(1)) {
                    Some(prev) => Prediction {
                        answer: prev.gold_answer.clone(),
                        edges: vec![(NodeId::qa(prev.turn), root)],
                    },
                    None => Prediction {
                        answer: "Do not know".to_string(),
                        edges: match ex.segments.len() {
                            0 => Vec::new(),
                            n => vec![(NodeId::segment(n as u32), root)],
                        },
                    },
                },
                Strategy::RandomGraph => {
                    let mut rng = question_stream(seed, &ex.id, t);
                    let candidates: Vec<(NodeId, NodeId)> =
                        build_candidate_graph(ex, t).root_edges().copied().collect();
                    let mut edges = Vec::new();
                    if !candidates.is_empty() {
                        // each edge kept with probability 1/2, retried until non-empty:
                        // uniform over non-empty subsets
                        while edges.is_empty() {
                            edges = candidates
                                .iter()
                                .copied()
                                .filter(|_| rng.next_u64() >> 63 == 1)
                                .collect();
                        }
                    }
                    let answer = SPECIAL_ANSWERS[rng.below(SPECIAL_ANSWERS.len() as u64) as usize];
                    Prediction {
                        answer: answer.to_string(),
                        edges,
                    }
                }
            };
            ((ex.id.clone(), t), prediction)
        })
        .collect()
}

pub fn predict(ds: &Dataset, strategy: Strategy, seed: u64) -> PredictionSet {
    predict_with(ds, strategy, seed, Exec::default())
}

pub fn predict_with(ds: &Dataset, strategy: Strategy, seed: u64, exec: Exec) -> PredictionSet {
    let entries = exec::map(exec, &ds.examples, |ex| predict_example(ex, strategy, seed))
        .into_iter()
        .flatten()
        .collect();
    PredictionSet { entries }
}
