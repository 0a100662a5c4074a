//! Behavioural experiments: where pairwise and global weighting disagree,
//! how far a value must move to flip a pairwise order, and whether a single
//! node's change disturbs everyone else.
//!
//! All perturbations and thresholds are in normalized units.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{
    global_weights, madm_rank_normalized, madm_utilities, normalize, DecisionMatrix, NormalizedMatrix, Scheme,
};
use crate::error::{Error, Result};
use crate::pairwise::{pair_utilities, Comparator, OutcomeTable, PairwiseOutcome};
use crate::random::random_matrix;
use crate::scalar::Scalar;

/// Grid steps per unit of normalized range used to bracket a flip.
const SCAN_STEPS: usize = 1024;
const BISECTION_ROUNDS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Finite(f64),
    /// No change inside the domain (or no weight on the attribute) flips the
    /// pair.
    Unbounded,
}

impl Threshold {
    pub fn magnitude(self) -> f64 {
        match self {
            Threshold::Finite(t) => t.abs(),
            Threshold::Unbounded => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(t) => Some(t),
            Threshold::Unbounded => None,
        }
    }
}

/// Global vs. pairwise utilities for one pair `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityDeltas {
    pub global_i: f64,
    pub global_j: f64,
    pub pair_i: f64,
    pub pair_j: f64,
    /// `pair_i - global_i`
    pub delta_i: f64,
    /// `pair_j - global_j`
    pub delta_j: f64,
    /// `delta_i - delta_j`
    pub delta_ij: f64,
    /// `|delta_ij| > |global_i - global_j|` with opposing signs.
    pub magnitude_condition: bool,
}

/// Flip thresholds under both weightings, each frozen and self-consistent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipThresholds {
    /// `-(U_i - U_j) / w_a` with global weights held fixed.
    pub madm_frozen: Threshold,
    /// Root of `U_i - U_j` with global weights recomputed.
    pub madm_root: Threshold,
    /// `-delta / w_a^ij` with pair weights held fixed.
    pub pmadm_frozen: Threshold,
    /// Root of the pairwise delta with pair weights recomputed.
    pub pmadm_root: Threshold,
    pub global_weight: f64,
    pub pair_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// Outcomes among untouched nodes are bit-identical.
    pub pmadm_stable: bool,
    /// Relative round-robin order of untouched nodes is unchanged.
    pub pmadm_order_stable: bool,
    /// Relative weighted-sum order of untouched nodes is unchanged.
    pub madm_stable: bool,
    /// The new row had to be clamped into the frozen domain.
    pub clamped: bool,
    pub madm_order_before: Vec<usize>,
    pub madm_order_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub target: String,
    pub other: Option<String>,
    pub attribute: Option<usize>,
    /// Self-consistent MADM threshold.
    pub flip_threshold_madm: Option<Threshold>,
    /// Self-consistent PMADM threshold.
    pub flip_threshold_pmadm: Option<Threshold>,
    pub flip: Option<FlipThresholds>,
    pub deltas: Option<UtilityDeltas>,
    /// The pair is ordered oppositely by MADM and PMADM.
    pub threshold_satisfied: bool,
    pub stability: Option<StabilityVerdict>,
    pub units: String,
}

impl PerturbationReport {
    fn new(target: &str) -> Self {
        Self {
            target: target.to_string(),
            other: None,
            attribute: None,
            flip_threshold_madm: None,
            flip_threshold_pmadm: None,
            flip: None,
            deltas: None,
            threshold_satisfied: false,
            stability: None,
            units: "normalized".to_string(),
        }
    }
}

fn check_pair<T: Scalar>(norm: &NormalizedMatrix<T>, i: usize, j: usize) -> Result<()> {
    let m = norm.m();
    for idx in [i, j] {
        if idx >= m {
            return Err(Error::NodeOutOfRange { index: idx, nodes: m });
        }
    }
    if i == j {
        return Err(Error::SameNode(i));
    }
    Ok(())
}

fn pair_outcome<T: Scalar>(norm: &NormalizedMatrix<T>, i: usize, j: usize) -> PairwiseOutcome<T> {
    pair_utilities(norm.row(i), norm.row(j)).expect("rows of one matrix")
}

/// First pair `(i, j)`, `i < j`, ordered oppositely by the global and the
/// pairwise utilities.
pub fn divergence_witness<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<Option<(usize, usize)>> {
    Ok(divergence_witness_normalized(&normalize(matrix, scheme)?))
}

pub fn divergence_witness_normalized<T: Scalar>(norm: &NormalizedMatrix<T>) -> Option<(usize, usize)> {
    let u = madm_utilities(norm, &global_weights(norm)).expect("weights sized from the same matrix");
    let cmp = Comparator::new(norm);
    let m = norm.m();
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .find(|&(i, j)| (u[i] - u[j]) * cmp.compare(i, j).delta < T::zero())
}

fn utility_deltas<T: Scalar>(norm: &NormalizedMatrix<T>, i: usize, j: usize) -> UtilityDeltas {
    let u = madm_utilities(norm, &global_weights(norm)).expect("weights sized from the same matrix");
    let p = pair_outcome(norm, i, j);
    let (gi, gj) = (u[i], u[j]);
    let (di, dj) = (p.utility_a - gi, p.utility_b - gj);
    let dij = di - dj;
    let gap = gi - gj;
    UtilityDeltas {
        global_i: gi.as_f64(),
        global_j: gj.as_f64(),
        pair_i: p.utility_a.as_f64(),
        pair_j: p.utility_b.as_f64(),
        delta_i: di.as_f64(),
        delta_j: dj.as_f64(),
        delta_ij: dij.as_f64(),
        magnitude_condition: dij.abs() > gap.abs() && dij * gap < T::zero(),
    }
}

/// How much the pairwise weighting moves each utility of `(i, j)`.
pub fn changing_threshold<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    scheme: Scheme,
    pair: (usize, usize),
) -> Result<PerturbationReport> {
    changing_threshold_normalized(&normalize(matrix, scheme)?, pair)
}

pub fn changing_threshold_normalized<T: Scalar>(
    norm: &NormalizedMatrix<T>,
    (i, j): (usize, usize),
) -> Result<PerturbationReport> {
    check_pair(norm, i, j)?;
    let u = madm_utilities(norm, &global_weights(norm)).expect("weights sized from the same matrix");
    let p = pair_outcome(norm, i, j);
    let mut report = PerturbationReport::new(&norm.node_ids()[i]);
    report.other = Some(norm.node_ids()[j].clone());
    report.deltas = Some(utility_deltas(norm, i, j));
    report.threshold_satisfied = (u[i] - u[j]) * p.delta < T::zero();
    Ok(report)
}

/// Smallest `t` in `[-x, 1 - x]` (nearest zero) at which `f` leaves the sign
/// it has at `t = 0`. The returned endpoint lies on the flipped side.
fn flip_root<F: Fn(f64) -> f64>(f: F, x: f64) -> Threshold {
    let base = f(0.0);
    if base == 0.0 {
        return Threshold::Finite(0.0);
    }
    let flipped = |v: f64| v * base <= 0.0;
    let h = 1.0 / SCAN_STEPS as f64;
    let (pos_len, neg_len) = (1.0 - x, x);
    let (mut prev_pos, mut prev_neg) = (0.0, 0.0);
    for k in 1..=SCAN_STEPS {
        let step = k as f64 * h;
        let mut hit = None;
        if prev_pos < pos_len {
            let t = step.min(pos_len);
            if flipped(f(t)) {
                hit = Some((prev_pos, t));
            }
            prev_pos = t;
        }
        if hit.is_none() && prev_neg > -neg_len {
            let t = (-step).max(-neg_len);
            if flipped(f(t)) {
                hit = Some((prev_neg, t));
            }
            prev_neg = t;
        }
        if let Some((mut inside, mut outside)) = hit {
            for _ in 0..BISECTION_ROUNDS {
                let mid = 0.5 * (inside + outside);
                if mid == inside || mid == outside {
                    break;
                }
                if flipped(f(mid)) {
                    outside = mid;
                } else {
                    inside = mid;
                }
            }
            return Threshold::Finite(outside);
        }
    }
    Threshold::Unbounded
}

fn shifted<T: Scalar>(norm: &NormalizedMatrix<T>, i: usize, a: usize, t: f64) -> NormalizedMatrix<T> {
    let mut row = norm.row(i).to_vec();
    row[a] = (row[a] + T::lit(t)).max(T::zero()).min(T::one());
    norm.with_normalized_row(i, &row).expect("shifted value stays in [0, 1]")
}

/// Change to node `i`'s attribute `a` that zeroes the pair's utility gap,
/// under global and pairwise weights.
pub fn flip_thresholds<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    scheme: Scheme,
    pair: (usize, usize),
    attribute: usize,
) -> Result<PerturbationReport> {
    flip_thresholds_normalized(&normalize(matrix, scheme)?, pair, attribute)
}

pub fn flip_thresholds_normalized<T: Scalar>(
    norm: &NormalizedMatrix<T>,
    (i, j): (usize, usize),
    a: usize,
) -> Result<PerturbationReport> {
    check_pair(norm, i, j)?;
    if a >= norm.n() {
        return Err(Error::AttributeOutOfRange {
            index: a,
            attributes: norm.n(),
        });
    }
    let w = global_weights(norm);
    let u = madm_utilities(norm, &w).expect("weights sized from the same matrix");
    let p = pair_outcome(norm, i, j);
    let (wa, pwa) = (w.0[a], p.weights.0[a]);
    let x = norm.value(i, a).as_f64();

    let madm_gap = |t: f64| {
        let n = shifted(norm, i, a, t);
        let u = madm_utilities(&n, &global_weights(&n)).expect("weights sized from the same matrix");
        (u[i] - u[j]).as_f64()
    };
    let pmadm_gap = |t: f64| pair_outcome(&shifted(norm, i, a, t), i, j).delta.as_f64();

    let (madm_frozen, madm_root) = if wa > T::zero() {
        (Threshold::Finite((-(u[i] - u[j]) / wa).as_f64()), flip_root(madm_gap, x))
    } else {
        (Threshold::Unbounded, Threshold::Unbounded)
    };
    let (pmadm_frozen, pmadm_root) = if pwa > T::zero() {
        (Threshold::Finite((-p.delta / pwa).as_f64()), flip_root(pmadm_gap, x))
    } else {
        (Threshold::Unbounded, Threshold::Unbounded)
    };

    let mut report = PerturbationReport::new(&norm.node_ids()[i]);
    report.other = Some(norm.node_ids()[j].clone());
    report.attribute = Some(a);
    report.flip_threshold_madm = Some(madm_root);
    report.flip_threshold_pmadm = Some(pmadm_root);
    report.flip = Some(FlipThresholds {
        madm_frozen,
        madm_root,
        pmadm_frozen,
        pmadm_root,
        global_weight: wa.as_f64(),
        pair_weight: pwa.as_f64(),
    });
    report.deltas = Some(utility_deltas(norm, i, j));
    report.threshold_satisfied = (u[i] - u[j]) * p.delta < T::zero();
    Ok(report)
}

/// Replaces node `node_id`'s raw row (normalization frozen, out-of-domain
/// values clamped) and checks what happens to everyone else.
pub fn stability_experiment<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    scheme: Scheme,
    node_id: &str,
    new_raw_row: &[T],
) -> Result<PerturbationReport> {
    let norm = normalize(matrix, scheme)?;
    let x = norm
        .node_index(node_id)
        .ok_or_else(|| Error::UnknownNode(node_id.to_string()))?;
    let (after, clamped) = norm.with_raw_row(x, new_raw_row)?;
    let mut report = stability_normalized(&norm, &after, x);
    if let Some(s) = report.stability.as_mut() {
        s.clamped = clamped;
    }
    Ok(report)
}

/// Stability verdicts for two normalized matrices differing in row `x`.
pub fn stability_normalized<T: Scalar>(
    before: &NormalizedMatrix<T>,
    after: &NormalizedMatrix<T>,
    x: usize,
) -> PerturbationReport {
    let t0 = OutcomeTable::compute(&Comparator::new(before));
    let t1 = OutcomeTable::compute(&Comparator::new(after));
    let m = before.m();
    let pmadm_stable = (0..m)
        .filter(|&a| a != x)
        .flat_map(|a| (a + 1..m).filter(move |&b| b != x).map(move |b| (a, b)))
        .all(|(a, b)| outcome_bits(t0.get(a, b)) == outcome_bits(t1.get(a, b)));

    let restricted = |t: &OutcomeTable<T>| {
        let wins = t.wins();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| wins[b].cmp(&wins[a]).then(a.cmp(&b)));
        order.retain(|&j| j != x);
        order
    };
    let madm_before = madm_rank_normalized(before).order_without(x);
    let madm_after = madm_rank_normalized(after).order_without(x);

    let mut report = PerturbationReport::new(&before.node_ids()[x]);
    report.stability = Some(StabilityVerdict {
        pmadm_stable,
        pmadm_order_stable: restricted(&t0) == restricted(&t1),
        madm_stable: madm_before == madm_after,
        clamped: false,
        madm_order_before: madm_before,
        madm_order_after: madm_after,
    });
    report
}

fn outcome_bits<T: Scalar>(o: &PairwiseOutcome<T>) -> Vec<u64> {
    let mut bits: Vec<u64> = o.weights.0.iter().map(|w| w.as_f64().to_bits()).collect();
    bits.extend([o.utility_a, o.utility_b, o.delta].map(|v| v.as_f64().to_bits()));
    bits
}

/// A seeded instance exhibiting some property, for committing as a fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub matrix: DecisionMatrix<f64>,
    pub trial: usize,
}

/// Searches 5 x 4 instances for one whose first diverging pair is `(0, 1)`
/// while attribute 0 carries less pairwise than global weight.
pub fn search_divergence<R: Rng>(rng: &mut R, max_trials: usize) -> Option<Witness> {
    (0..max_trials).find_map(|trial| {
        let matrix = random_matrix::<f64, R>(rng, 5, 4);
        let norm = normalize(&matrix, Scheme::Max).ok()?;
        if divergence_witness_normalized(&norm) != Some((0, 1)) {
            return None;
        }
        let pw = pair_outcome(&norm, 0, 1).weights.0[0];
        (pw < global_weights(&norm).0[0]).then_some(Witness { matrix, trial })
    })
}

/// Searches 5 x 4 instances plus a new row for the last node that reorders
/// the other four under MADM. Returns the instance and the new raw row.
pub fn search_madm_instability<R: Rng>(rng: &mut R, max_trials: usize) -> Option<(Witness, Vec<f64>)> {
    (0..max_trials).find_map(|trial| {
        let matrix = random_matrix::<f64, R>(rng, 5, 4);
        let row: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
        let r = stability_experiment(&matrix, Scheme::Max, "N5", &row).ok()?;
        let s = r.stability?;
        (!s.madm_stable && !s.clamped).then_some((Witness { matrix, trial }, row))
    })
}

/// Searches 5 x 4 instances for a pair `(0, 1)` and attribute 0 with both
/// self-consistent thresholds finite, where the pairwise weight exceeds the
/// global one (`pair_heavier`) or falls below it, and the threshold
/// magnitudes are ordered accordingly.
pub fn search_flip_direction<R: Rng>(rng: &mut R, pair_heavier: bool, max_trials: usize) -> Option<Witness> {
    (0..max_trials).find_map(|trial| {
        let matrix = random_matrix::<f64, R>(rng, 5, 4);
        let r = flip_thresholds(&matrix, Scheme::Max, (0, 1), 0).ok()?;
        let f = r.flip?;
        let (madm, pmadm) = (f.madm_root.finite()?, f.pmadm_root.finite()?);
        let ok = if pair_heavier {
            f.pair_weight > f.global_weight && pmadm.abs() < madm.abs()
        } else {
            f.pair_weight < f.global_weight && pmadm.abs() > madm.abs()
        };
        ok.then_some(Witness { matrix, trial })
    })
}
