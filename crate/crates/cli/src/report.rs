//! JSON report documents. Field names are part of the file format.

use serde::{Deserialize, Serialize};

use pmadm_core::survey::SurveySummary;
use pmadm_core::tree::{DecomposingTree, Probability, TreeMetrics};
use pmadm_core::{Ranking, Scores};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum ReportFile {
    Rank(RankReport),
    AnalyzeTree(TreeReport),
    Verify(SurveySummary),
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain data");
        s.push('\n');
        s
    }

    /// Dispatches on the tag by hand: serde's buffered tagged-enum path rejects u128 fields.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        use serde::de::Error as _;
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let tag = value
            .as_object_mut()
            .and_then(|o| o.remove("report"))
            .ok_or_else(|| serde_json::Error::custom("missing `report` tag"))?;
        match tag.as_str() {
            Some("rank") => serde_json::from_value(value).map(ReportFile::Rank),
            Some("analyze_tree") => serde_json::from_value(value).map(ReportFile::AnalyzeTree),
            Some("verify") => serde_json::from_value(value).map(ReportFile::Verify),
            _ => Err(serde_json::Error::custom(format!("unknown report kind {tag}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScore {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub algorithm: String,
    pub scheme: String,
    pub pivot: Option<String>,
    pub ordered_ids: Vec<String>,
    /// `utility`, `wins` or `placement`.
    pub score_kind: String,
    /// Best first, matching `ordered_ids`.
    pub scores: Vec<NodeScore>,
    pub comparison_count: u64,
    pub utility_evaluation_count: u64,
    pub cycle_detected: bool,
    pub tie_groups: Vec<Vec<String>>,
    /// Node values per layer, lPMADM only.
    pub tree: Option<Vec<Vec<usize>>>,
}

impl RankReport {
    pub fn new(ranking: &Ranking<f64>, scheme: &str, pivot: Option<String>, tree: Option<&DecomposingTree>) -> Self {
        let values = ranking.scores.as_f64();
        let score_kind = match ranking.scores {
            Scores::Utility(_) => "utility",
            Scores::Wins(_) => "wins",
            Scores::Placement(_) => "placement",
        };
        let id = |j: usize| ranking.node_ids[j].clone();
        Self {
            algorithm: ranking.algorithm.name().to_string(),
            scheme: scheme.to_string(),
            pivot,
            ordered_ids: ranking.order.iter().map(|&j| id(j)).collect(),
            score_kind: score_kind.to_string(),
            scores: ranking
                .order
                .iter()
                .map(|&j| NodeScore {
                    id: id(j),
                    score: values[j],
                })
                .collect(),
            comparison_count: ranking.comparison_count,
            utility_evaluation_count: ranking.utility_evaluation_count,
            cycle_detected: ranking.cycle_detected,
            tie_groups: ranking
                .tie_groups
                .iter()
                .map(|g| g.iter().map(|&j| id(j)).collect())
                .collect(),
            tree: tree.map(DecomposingTree::layers),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    pub m: usize,
    pub layers: usize,
    pub divisions: usize,
    pub comparisons: u64,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub final_layer_sum: usize,
    pub final_layer_node_count: usize,
    pub optimal_split: (usize, usize),
    pub fault_tolerance: usize,
    pub tree_fault_tolerance: u128,
    pub max_fault_tolerance_node: usize,
    pub probability_optimal: Probability,
    pub probability_optimal_value: f64,
    pub tree: Vec<Vec<usize>>,
}

impl TreeReport {
    pub fn new(metrics: TreeMetrics, tree: &DecomposingTree) -> Self {
        Self {
            m: metrics.m,
            layers: metrics.layers,
            divisions: metrics.divisions,
            comparisons: metrics.comparisons,
            lower_bound: metrics.lower_bound,
            upper_bound: metrics.upper_bound,
            final_layer_sum: metrics.final_layer_sum,
            final_layer_node_count: metrics.final_layer_node_count,
            optimal_split: metrics.optimal_split,
            fault_tolerance: metrics.fault_tolerance,
            tree_fault_tolerance: metrics.tree_fault_tolerance,
            max_fault_tolerance_node: metrics.max_fault_tolerance_node,
            probability_optimal: metrics.probability_optimal,
            probability_optimal_value: metrics.probability_optimal.value(),
            tree: tree.layers(),
        }
    }
}
