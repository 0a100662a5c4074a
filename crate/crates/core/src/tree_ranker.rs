//! Quicksort-style pairwise ranking (lPMADM).
//!
//! A pivot is compared against every other member of the current subset;
//! nodes that lose go left, nodes that win go right, and both sides are
//! ranked recursively. Only `sum(subset - 1)` comparisons are made instead of
//! the full round robin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{madm_rank_normalized, normalize, DecisionMatrix, NormalizedMatrix, Scheme};
use crate::error::Result;
use crate::pairwise::{pmadm_rank_normalized, Comparator, Verdict};
use crate::ranking::{adjacent_groups, Algorithm, Ranking, Scores};
use crate::scalar::Scalar;
use crate::tree::DecomposingTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotStrategy {
    /// Uniform pick within each subset, driven by a seeded ChaCha8 stream.
    Random(u64),
    /// Middle of the subset under the weighted-sum order.
    MadmPresequence,
    /// Middle of the subset under the average per-attribute rank.
    AvgOrderPresequence,
    /// Middle of the subset under the full round-robin order. Uncounted;
    /// meant for checking the lower bound.
    OracleMedian,
}

impl std::fmt::Display for PivotStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PivotStrategy::Random(seed) => write!(f, "random:{seed}"),
            PivotStrategy::MadmPresequence => f.write_str("madm"),
            PivotStrategy::AvgOrderPresequence => f.write_str("avg-order"),
            PivotStrategy::OracleMedian => f.write_str("oracle-median"),
        }
    }
}

impl std::str::FromStr for PivotStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "madm" => Ok(Self::MadmPresequence),
            "avg-order" | "avg_order" => Ok(Self::AvgOrderPresequence),
            "oracle-median" | "oracle_median" => Ok(Self::OracleMedian),
            other => match other.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(Self::Random)
                    .map_err(|_| format!("invalid random seed `{seed}`")),
                None => Err(format!(
                    "unknown pivot strategy `{s}` (expected random:SEED, madm, avg-order or oracle-median)"
                )),
            },
        }
    }
}

/// Per-attribute ranks and their per-node average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvgOrderReport {
    /// `ranks[node][attribute]`, 1 = best; equal values share the mean rank.
    pub ranks: Vec<Vec<f64>>,
    pub averages: Vec<f64>,
}

pub fn presequence_madm<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<Vec<usize>> {
    Ok(madm_rank_normalized(&normalize(matrix, scheme)?).order)
}

pub fn presequence_avg_order<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    scheme: Scheme,
) -> Result<(AvgOrderReport, Vec<usize>)> {
    Ok(avg_order_normalized(&normalize(matrix, scheme)?))
}

/// Mean ranks of one column, larger values ranked first.
fn column_ranks<T: Scalar>(col: &[T]) -> Vec<f64> {
    let m = col.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| col[b].partial_cmp(&col[a]).expect("finite").then(a.cmp(&b)));
    let mut ranks = vec![0.0; m];
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && col[idx[end]] == col[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let mean = (start + 1 + end) as f64 / 2.0;
        for &j in &idx[start..end] {
            ranks[j] = mean;
        }
        start = end;
    }
    ranks
}

pub fn avg_order_normalized<T: Scalar>(norm: &NormalizedMatrix<T>) -> (AvgOrderReport, Vec<usize>) {
    let (m, n) = (norm.m(), norm.n());
    let mut ranks = vec![vec![0.0; n]; m];
    for i in 0..n {
        let col: Vec<T> = norm.column(i).collect();
        for (j, r) in column_ranks(&col).into_iter().enumerate() {
            ranks[j][i] = r;
        }
    }
    let averages: Vec<f64> = ranks.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| averages[a].total_cmp(&averages[b]).then(a.cmp(&b)));
    (AvgOrderReport { ranks, averages }, order)
}

enum Picker {
    /// Subsets are kept in this order; the pivot is the lower middle.
    Presequence,
    Random(ChaCha8Rng),
}

impl Picker {
    fn pick(&mut self, subset: &[usize]) -> usize {
        match self {
            Picker::Presequence => (subset.len() - 1) / 2,
            Picker::Random(rng) => rng.gen_range(0..subset.len()),
        }
    }
}

/// One pivot step: the pivot and the nodes that lost to it or beat it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStep {
    pub pivot: usize,
    pub losers: Vec<usize>,
    pub winners: Vec<usize>,
}

struct Partitioner<'a, 'b, T> {
    cmp: &'b Comparator<'a, T>,
    picker: Picker,
    tree: DecomposingTree,
    steps: Vec<PartitionStep>,
    /// `tied[j]` is the representative of the tie class of `j`.
    tied: Vec<usize>,
}

impl<T: Scalar> Partitioner<'_, '_, T> {
    fn class(&mut self, j: usize) -> usize {
        let mut r = j;
        while self.tied[r] != r {
            r = self.tied[r];
        }
        self.tied[j] = r;
        r
    }

    fn join(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.class(a), self.class(b));
        self.tied[ra.max(rb)] = ra.min(rb);
    }

    /// Best-first order of `subset`, whose size is held by tree node `slot`.
    fn rank(&mut self, subset: Vec<usize>, slot: usize) -> Vec<usize> {
        if subset.len() <= 1 {
            return subset;
        }
        let pivot = subset[self.picker.pick(&subset)];
        let (mut losers, mut winners) = (Vec::new(), Vec::new());
        for &j in subset.iter().filter(|&&j| j != pivot) {
            match self.cmp.compare(j, pivot).verdict {
                Verdict::AWins => winners.push(j),
                Verdict::BWins => losers.push(j),
                Verdict::Tie => {
                    self.join(j, pivot);
                    // keep the index tie-break of the round robin
                    if j > pivot {
                        losers.push(j)
                    } else {
                        winners.push(j)
                    }
                }
            }
        }
        let (ls, ws) = self
            .tree
            .split(slot, losers.len(), winners.len())
            .expect("partition sizes sum to subset size - 1");
        self.steps.push(PartitionStep {
            pivot,
            losers: losers.clone(),
            winners: winners.clone(),
        });
        let mut out = self.rank(winners, ws);
        out.push(pivot);
        out.extend(self.rank(losers, ls));
        out
    }
}

pub fn lpmadm_rank<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    scheme: Scheme,
    strategy: PivotStrategy,
) -> Result<(Ranking<T>, DecomposingTree)> {
    Ok(lpmadm_rank_normalized(&normalize(matrix, scheme)?, strategy))
}

pub fn lpmadm_rank_normalized<T: Scalar>(
    norm: &NormalizedMatrix<T>,
    strategy: PivotStrategy,
) -> (Ranking<T>, DecomposingTree) {
    let (ranking, tree, _) = lpmadm_trace(norm, strategy);
    (ranking, tree)
}

/// [`lpmadm_rank_normalized`] plus every pivot step, in execution order.
pub fn lpmadm_trace<T: Scalar>(
    norm: &NormalizedMatrix<T>,
    strategy: PivotStrategy,
) -> (Ranking<T>, DecomposingTree, Vec<PartitionStep>) {
    let m = norm.m();
    let (initial, picker) = match strategy {
        PivotStrategy::Random(seed) => ((0..m).collect(), Picker::Random(ChaCha8Rng::seed_from_u64(seed))),
        PivotStrategy::MadmPresequence => (madm_rank_normalized(norm).order, Picker::Presequence),
        PivotStrategy::AvgOrderPresequence => (avg_order_normalized(norm).1, Picker::Presequence),
        PivotStrategy::OracleMedian => (pmadm_rank_normalized(norm).order, Picker::Presequence),
    };
    let cmp = Comparator::new(norm);
    let mut part = Partitioner {
        cmp: &cmp,
        picker,
        tree: DecomposingTree::new(m),
        steps: Vec::new(),
        tied: (0..m).collect(),
    };
    let order = part.rank(initial, DecomposingTree::ROOT);
    let tree = part.tree.clone();
    let tie_groups = adjacent_groups(&order, |a, b| part.class(a) == part.class(b));

    let mut placement = vec![0usize; m];
    for (pos, &j) in order.iter().enumerate() {
        placement[j] = m - 1 - pos;
    }
    let comparisons = cmp.calls();
    debug_assert_eq!(comparisons, tree.comparison_cost());
    let ranking = Ranking {
        algorithm: Algorithm::Lpmadm,
        node_ids: norm.node_ids().to_vec(),
        order,
        scores: Scores::Placement(placement),
        comparison_count: comparisons,
        utility_evaluation_count: 2 * comparisons,
        cycle_detected: false,
        tie_groups,
    };
    (ranking, tree, part.steps)
}
