//! The ranking result shared by all three rankers.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Global variance-weighted sum over all nodes.
    Madm,
    /// Round-robin of pairwise comparisons.
    Pmadm,
    /// Quicksort-style pairwise ranking.
    Lpmadm,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Madm => "madm",
            Algorithm::Pmadm => "pmadm",
            Algorithm::Lpmadm => "lpmadm",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "madm" => Ok(Algorithm::Madm),
            "pmadm" => Ok(Algorithm::Pmadm),
            "lpmadm" => Ok(Algorithm::Lpmadm),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Per-node score, indexed by original node index.
#[derive(Debug, Clone, PartialEq)]
pub enum Scores<T> {
    /// MADM utility `U_j`.
    Utility(Vec<T>),
    /// Number of pairwise comparisons won.
    Wins(Vec<usize>),
    /// Number of nodes placed below the node by the partitioning ranker.
    Placement(Vec<usize>),
}

impl<T: Scalar> Scores<T> {
    pub fn len(&self) -> usize {
        match self {
            Scores::Utility(v) => v.len(),
            Scores::Wins(v) | Scores::Placement(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            Scores::Utility(v) => v.iter().map(|x| x.as_f64()).collect(),
            Scores::Wins(v) | Scores::Placement(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking<T> {
    pub algorithm: Algorithm,
    /// Input node ids, indexed by node index.
    pub node_ids: Vec<String>,
    /// Node indices, best first.
    pub order: Vec<usize>,
    pub scores: Scores<T>,
    pub comparison_count: u64,
    pub utility_evaluation_count: u64,
    pub cycle_detected: bool,
    /// Groups (size >= 2) of nodes the ranker could not separate, each in
    /// ranking order.
    pub tie_groups: Vec<Vec<usize>>,
}

impl<T: Scalar> Ranking<T> {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn ordered_ids(&self) -> Vec<&str> {
        self.order.iter().map(|&j| self.node_ids[j].as_str()).collect()
    }

    pub fn best(&self) -> Option<usize> {
        self.order.first().copied()
    }

    /// 0-based position of `node` in the order (0 = best).
    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.order.iter().position(|&j| j == node)
    }

    /// The order with `node` removed.
    pub fn order_without(&self, node: usize) -> Vec<usize> {
        self.order.iter().copied().filter(|&j| j != node).collect()
    }
}

/// Groups consecutive entries of `order` whose keys compare equal.
pub(crate) fn adjacent_groups<F>(order: &[usize], mut key_eq: F) -> Vec<Vec<usize>>
where
    F: FnMut(usize, usize) -> bool,
{
    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for &j in order {
        match current.last() {
            Some(&prev) if key_eq(prev, j) => current.push(j),
            _ => {
                if current.len() > 1 {
                    groups.push(std::mem::take(&mut current));
                }
                current.clear();
                current.push(j);
            }
        }
    }
    if current.len() > 1 {
        groups.push(current);
    }
    groups
}
