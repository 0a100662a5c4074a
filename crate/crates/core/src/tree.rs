//! Decomposing trees: the integer trees recording subset sizes produced by
//! recursive pivoting, plus closed-form cost analysis and a brute-force
//! enumeration oracle.
//!
//! A node of value `v >= 2` splits into two children summing to `v - 1`
//! (the pivot leaves the subset). Values 0 and 1 are terminal.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub value: usize,
    pub layer: usize,
    pub parent: Option<usize>,
    /// `(left, right)`: left holds the nodes that lost to the pivot.
    pub children: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposingTree {
    nodes: Vec<TreeNode>,
}

impl DecomposingTree {
    /// A tree holding only the root.
    pub fn new(m: usize) -> Self {
        Self {
            nodes: vec![TreeNode {
                value: m,
                layer: 0,
                parent: None,
                children: None,
            }],
        }
    }

    /// Builds a complete tree by splitting every node of value >= 2 with
    /// `splitter`, which must return children summing to `v - 1`.
    pub fn from_splitter<F>(m: usize, mut splitter: F) -> Result<Self>
    where
        F: FnMut(usize) -> (usize, usize),
    {
        let mut tree = Self::new(m);
        let mut queue = VecDeque::from([0usize]);
        while let Some(id) = queue.pop_front() {
            let v = tree.nodes[id].value;
            if v >= 2 {
                let (l, r) = splitter(v);
                let (li, ri) = tree.split(id, l, r)?;
                queue.push_back(li);
                queue.push_back(ri);
            }
        }
        Ok(tree)
    }

    pub const ROOT: usize = 0;

    /// Attaches children to `node`. Returns their ids.
    pub fn split(&mut self, node: usize, left: usize, right: usize) -> Result<(usize, usize)> {
        let parent = self
            .nodes
            .get(node)
            .ok_or(Error::NodeOutOfRange {
                index: node,
                nodes: self.nodes.len(),
            })?
            .clone();
        if parent.children.is_some() {
            return Err(Error::InvalidArgument(format!("tree node {node} is already split")));
        }
        if parent.value < 2 || left + right + 1 != parent.value {
            return Err(Error::InvalidArgument(format!(
                "cannot split value {} into ({left}, {right}): children must sum to parent - 1",
                parent.value
            )));
        }
        let layer = parent.layer + 1;
        let li = self.nodes.len();
        for value in [left, right] {
            self.nodes.push(TreeNode {
                value,
                layer,
                parent: Some(node),
                children: None,
            });
        }
        self.nodes[node].children = Some((li, li + 1));
        Ok((li, li + 1))
    }

    pub fn root_value(&self) -> usize {
        self.nodes[0].value
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    /// Node ids grouped by layer, left to right.
    pub fn layer_ids(&self) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(id) = queue.pop_front() {
            let node = &self.nodes[id];
            if layers.len() <= node.layer {
                layers.push(Vec::new());
            }
            layers[node.layer].push(id);
            if let Some((l, r)) = node.children {
                queue.push_back(l);
                queue.push_back(r);
            }
        }
        layers
    }

    /// Node values grouped by layer, left to right; layer 0 is `[m]`.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        self.layer_ids()
            .into_iter()
            .map(|ids| ids.into_iter().map(|id| self.nodes[id].value).collect())
            .collect()
    }

    /// Index of the deepest layer (0 for a lone root).
    pub fn layer_count(&self) -> usize {
        self.nodes.iter().map(|n| n.layer).max().unwrap_or(0)
    }

    /// Number of pivot choices, i.e. split nodes.
    pub fn divisions(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_some()).count()
    }

    /// Sum of all node values below the root: each split of `v` costs `v - 1`.
    pub fn comparison_cost(&self) -> u64 {
        self.nodes.iter().skip(1).map(|n| n.value as u64).sum()
    }

    /// Neighbour count: parent plus children.
    pub fn degree(&self, id: usize) -> usize {
        let n = &self.nodes[id];
        usize::from(n.parent.is_some()) + if n.children.is_some() { 2 } else { 0 }
    }

    pub fn is_terminal(&self, id: usize) -> bool {
        self.nodes[id].children.is_none()
    }

    /// Sum of the values in the deepest layer.
    pub fn deepest_layer_sum(&self) -> usize {
        let l = self.layer_count();
        self.nodes.iter().filter(|n| n.layer == l).map(|n| n.value).sum()
    }

    /// Number of nodes in the deepest layer.
    pub fn deepest_layer_node_count(&self) -> usize {
        let l = self.layer_count();
        self.nodes.iter().filter(|n| n.layer == l).count()
    }

    /// Child pairs grouped by the layer the children sit in (index 0 is
    /// layer 1).
    pub fn splits_by_layer(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.layer_count()];
        for ids in self.layer_ids() {
            for id in ids {
                if let Some((l, r)) = self.nodes[id].children {
                    let layer = self.nodes[id].layer;
                    out[layer].push((self.nodes[l].value, self.nodes[r].value));
                }
            }
        }
        out
    }

    /// Checks the decomposition rule and that every node of value >= 2 is
    /// split while 0/1 nodes are terminal.
    pub fn validate(&self) -> Result<()> {
        for (id, n) in self.nodes.iter().enumerate() {
            match n.children {
                Some((l, r)) => {
                    let (lv, rv) = (self.nodes[l].value, self.nodes[r].value);
                    if lv + rv + 1 != n.value {
                        return Err(Error::InvalidArgument(format!(
                            "node {id}: children {lv} + {rv} != {} - 1",
                            n.value
                        )));
                    }
                }
                None if n.value >= 2 => {
                    return Err(Error::InvalidArgument(format!(
                        "node {id} of value {} is not decomposed",
                        n.value
                    )))
                }
                None => {}
            }
        }
        Ok(())
    }
}

pub fn floor_log2(m: usize) -> u32 {
    assert!(m > 0, "log2 of zero");
    usize::BITS - 1 - m.leading_zeros()
}

/// Depth of the optimal subtree rooted at value `n` (0 for terminals).
pub fn optimal_depth(n: usize) -> u32 {
    if n < 2 {
        0
    } else {
        floor_log2(n)
    }
}

/// Middle-pivot split `(ceil((v-1)/2), floor((v-1)/2))`.
pub fn optimal_split(v: usize) -> (usize, usize) {
    debug_assert!(v >= 2);
    (v / 2, (v - 1) / 2)
}

pub fn optimal_tree(m: usize) -> DecomposingTree {
    DecomposingTree::from_splitter(m, optimal_split).expect("optimal split is always valid")
}

/// Worst case: the pivot is always the extreme node.
pub fn chain_tree(m: usize) -> DecomposingTree {
    DecomposingTree::from_splitter(m, |v| (v - 1, 0)).expect("chain split is always valid")
}

/// `(layers, divisions)`.
pub fn layers_and_divisions(tree: &DecomposingTree) -> (usize, usize) {
    (tree.layer_count(), tree.divisions())
}

fn require_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m must be at least 2 (got {m})")));
    }
    Ok(())
}

/// `(lower, upper)` comparison counts. The lower bound sums the layer totals
/// `m - 2^i + 1` of the balanced tree over layers `1..=floor(log2 m)`; the
/// upper bound is `m(m-1)/2`.
pub fn comparison_bounds(m: usize) -> Result<(u64, u64)> {
    require_m(m)?;
    let l = floor_log2(m);
    let lower: u64 = (1..=l).map(|i| (m as u64 + 1) - (1u64 << i)).sum();
    let upper = (m as u64) * (m as u64 - 1) / 2;
    Ok((lower, upper))
}

/// Compact closed form `(L-1)(m-1) + (m - 2^L + 1) - (2^(L-1) - 2)`,
/// `L = floor(log2 m)`. Differs from the layer sum by `2^(L-1) - 2(L-1)`, so
/// it only agrees with [`comparison_bounds`] for `4 <= m < 16`.
pub fn lower_bound_compact_form(m: usize) -> Result<i64> {
    require_m(m)?;
    let l = floor_log2(m) as i64;
    let m = m as i64;
    Ok((l - 1) * (m - 1) + (m - (1 << l) + 1) - ((1 << (l - 1)) - 2))
}

/// Sum of the final-layer values of the balanced tree: `m - 2^floor(log2 m) + 1`.
pub fn final_layer_sum(m: usize) -> Result<usize> {
    require_m(m)?;
    Ok(epsilon(m))
}

/// Final-layer sum extended to terminals (a 0/1 node is its own final layer).
fn epsilon(n: usize) -> usize {
    if n < 2 {
        n
    } else {
        n - (1 << floor_log2(n)) + 1
    }
}

/// Number of first-level splits that keep the optimal comparison count,
/// for a first-level split `(n1, n2)`.
///
/// With both sides at the same optimal depth `L`, final-layer "1"s can move
/// from the fuller side into the other side's free slots:
/// `min(eps_max, 2^floor(log2 n_max) - eps_min) + 1`. When the depths differ,
/// or both sides are terminal, nothing can move and the result is 1.
pub fn fault_tolerance(n1: usize, n2: usize) -> usize {
    let n_max = n1.max(n2);
    if n_max <= 1 || optimal_depth(n1) != optimal_depth(n2) {
        return 1;
    }
    let (e1, e2) = (epsilon(n1), epsilon(n2));
    let (e_max, e_min) = (e1.max(e2), e1.min(e2));
    let slots = 1usize << floor_log2(n_max);
    e_max.min(slots.saturating_sub(e_min)) + 1
}

/// Variant of [`fault_tolerance`] taking the slot count from the next power
/// of two, `2^ceil(log2 n_max)`. Differs only when `n_max` is not a power of
/// two.
pub fn fault_tolerance_ceiling_form(n1: usize, n2: usize) -> usize {
    let n_max = n1.max(n2);
    if n_max <= 1 || optimal_depth(n1) != optimal_depth(n2) {
        return 1;
    }
    let (e1, e2) = (epsilon(n1), epsilon(n2));
    let (e_max, e_min) = (e1.max(e2), e1.min(e2));
    e_max.min(n_max.next_power_of_two() - e_min) + 1
}

/// Value in `[2^k, 2^(k+1))` with the largest fault tolerance:
/// `tau = 3 * 2^(k-1)` when odd, else `tau - 1`.
pub fn max_fault_tolerance_node(k: u32) -> Result<usize> {
    if k == 0 || k >= usize::BITS - 1 {
        return Err(Error::InvalidArgument(format!("range exponent must be in 1..{} (got {k})", usize::BITS - 1)));
    }
    let tau = (1usize << k) + ((1usize << (k + 1)) - (1usize << k)) / 2;
    Ok(if tau % 2 == 1 { tau } else { tau - 1 })
}

/// Whole-tree tolerance: per layer, sum the per-split tolerances, then
/// multiply the layer sums.
pub fn tree_fault_tolerance(tree: &DecomposingTree) -> u128 {
    tree.splits_by_layer()
        .iter()
        .filter(|layer| !layer.is_empty())
        .map(|layer| layer.iter().map(|&(l, r)| fault_tolerance(l, r) as u128).sum::<u128>())
        .fold(1u128, |acc, s| acc.saturating_mul(s))
}

/// `favorable / total` kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probability {
    pub favorable: usize,
    pub total: usize,
}

impl Probability {
    pub fn value(self) -> f64 {
        self.favorable as f64 / self.total as f64
    }

    /// Exact `self <= other`.
    pub fn le(self, other: Self) -> bool {
        (self.favorable as u128) * (other.total as u128) <= (other.favorable as u128) * (self.total as u128)
    }
}

/// Probability that a first-level split achieves the optimal count:
/// `fault_tolerance(n1, n2) / floor(m/2)`. Cross-range splits have
/// tolerance 1, giving `1 / floor(m/2)`.
pub fn probability_optimal(m: usize, split: (usize, usize)) -> Result<Probability> {
    require_m(m)?;
    if split.0 + split.1 + 1 != m {
        return Err(Error::InvalidArgument(format!(
            "split ({}, {}) does not sum to m - 1 = {}",
            split.0,
            split.1,
            m - 1
        )));
    }
    Ok(Probability {
        favorable: fault_tolerance(split.0, split.1),
        total: m / 2,
    })
}

/// Summary used by reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeMetrics {
    pub m: usize,
    pub layers: usize,
    pub divisions: usize,
    pub comparisons: u64,
    pub final_layer_sum: usize,
    pub final_layer_node_count: usize,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub optimal_split: (usize, usize),
    pub fault_tolerance: usize,
    pub tree_fault_tolerance: u128,
    pub max_fault_tolerance_node: usize,
    pub probability_optimal: Probability,
}

pub fn tree_metrics(m: usize) -> Result<TreeMetrics> {
    require_m(m)?;
    let tree = optimal_tree(m);
    let (lower, upper) = comparison_bounds(m)?;
    let split = optimal_split(m);
    Ok(TreeMetrics {
        m,
        layers: tree.layer_count(),
        divisions: tree.divisions(),
        comparisons: tree.comparison_cost(),
        final_layer_sum: final_layer_sum(m)?,
        final_layer_node_count: tree.deepest_layer_node_count(),
        lower_bound: lower,
        upper_bound: upper,
        optimal_split: split,
        fault_tolerance: fault_tolerance(split.0, split.1),
        tree_fault_tolerance: tree_fault_tolerance(&tree),
        max_fault_tolerance_node: max_fault_tolerance_node(floor_log2(m))?,
        probability_optimal: probability_optimal(m, split)?,
    })
}

pub const DEFAULT_ENUMERATION_CAP: usize = 20;
/// Largest `m` for which the full cost distribution is reported.
pub const DISTRIBUTION_LIMIT: usize = 16;

/// Exhaustive view of every way to decompose `m` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub m: usize,
    pub min_comparisons: u64,
    pub max_comparisons: u64,
    /// Left sizes `a` of the first-level splits `(a, m-1-a)` that still reach
    /// the minimum.
    pub optimal_first_splits: Vec<usize>,
    /// Same, counting `(a, b)` and `(b, a)` once.
    pub optimal_unordered_splits: usize,
    /// Complete trees attaining the minimum.
    pub optimal_decompositions: u128,
    /// Comparison count -> number of complete trees, for `m <= 16`.
    pub distribution: Option<BTreeMap<u64, u128>>,
}

/// Per-value minimal and maximal costs for all values `0..=m`.
pub(crate) fn cost_tables(m: usize) -> (Vec<u64>, Vec<u64>) {
    let mut min = vec![0u64; m + 1];
    let mut max = vec![0u64; m + 1];
    for v in 2..=m {
        let (mut lo, mut hi) = (u64::MAX, 0u64);
        for a in 0..v {
            let b = v - 1 - a;
            lo = lo.min(min[a] + min[b]);
            hi = hi.max(max[a] + max[b]);
        }
        min[v] = (v as u64 - 1) + lo;
        max[v] = (v as u64 - 1) + hi;
    }
    (min, max)
}

pub fn enumerate_decompositions(m: usize, cap: usize) -> Result<EnumerationReport> {
    require_m(m)?;
    if m > cap {
        return Err(Error::CapExceeded { m, cap });
    }
    let (min, max) = cost_tables(m);
    let mut optimal_count = vec![1u128; m + 1];
    for v in 2..=m {
        optimal_count[v] = (0..v)
            .filter(|&a| min[a] + min[v - 1 - a] + (v as u64 - 1) == min[v])
            .map(|a| optimal_count[a] * optimal_count[v - 1 - a])
            .sum();
    }
    let optimal_first_splits: Vec<usize> = (0..m)
        .filter(|&a| min[a] + min[m - 1 - a] + (m as u64 - 1) == min[m])
        .collect();
    let optimal_unordered_splits = optimal_first_splits.iter().filter(|&&a| a >= m - 1 - a).count();
    let distribution = (m <= DISTRIBUTION_LIMIT).then(|| cost_distribution(m));
    Ok(EnumerationReport {
        m,
        min_comparisons: min[m],
        max_comparisons: max[m],
        optimal_first_splits,
        optimal_unordered_splits,
        optimal_decompositions: optimal_count[m],
        distribution,
    })
}

/// Cost histogram over all complete trees, by convolution over first-level
/// splits.
fn cost_distribution(m: usize) -> BTreeMap<u64, u128> {
    let mut dist: Vec<BTreeMap<u64, u128>> = vec![BTreeMap::from([(0, 1)]); m + 1];
    for v in 2..=m {
        let mut acc = BTreeMap::new();
        for a in 0..v {
            for (&ca, &na) in &dist[a] {
                for (&cb, &nb) in &dist[v - 1 - a] {
                    *acc.entry(ca + cb + v as u64 - 1).or_insert(0u128) += na * nb;
                }
            }
        }
        dist[v] = acc;
    }
    dist.swap_remove(m)
}

/// One comparison between the tolerance formula and brute force.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultToleranceRecord {
    pub m: usize,
    pub split: (usize, usize),
    pub formula: usize,
    pub ceiling_form: usize,
    pub ordered_count: usize,
    pub unordered_count: usize,
}

impl FaultToleranceRecord {
    pub fn agrees(&self) -> bool {
        self.formula == self.unordered_count
    }
}

/// Formula vs. enumeration for every `m` in `range` whose balanced split puts
/// both sides at the same optimal depth.
pub fn fault_tolerance_records(range: std::ops::RangeInclusive<usize>) -> Result<Vec<FaultToleranceRecord>> {
    let cap = *range.end();
    let mut out = Vec::new();
    for m in range {
        if m < 2 {
            continue;
        }
        let split = optimal_split(m);
        if optimal_depth(split.0) != optimal_depth(split.1) {
            continue;
        }
        let report = enumerate_decompositions(m, cap)?;
        out.push(FaultToleranceRecord {
            m,
            split,
            formula: fault_tolerance(split.0, split.1),
            ceiling_form: fault_tolerance_ceiling_form(split.0, split.1),
            ordered_count: report.optimal_first_splits.len(),
            unordered_count: report.optimal_unordered_splits,
        });
    }
    Ok(out)
}
