//! Pairwise MADM: weights and utilities computed from two nodes at a time.
//!
//! For rows `a`, `b` with differences `d_i = a_i - b_i` the pair weights are
//! `d_i^2 / sum d^2` (the two-node variance `d_i^2 / 4` normalized), and the
//! utility gap collapses to `sum d^3 / sum d^2`. The outcome for a pair never
//! looks at any third node.

use std::cell::Cell;

use crate::decision::{normalize, population_variance, weighted_sum, DecisionMatrix, NormalizedMatrix, Scheme, WeightVector};
use crate::error::{Error, Result};
use crate::ranking::{adjacent_groups, Algorithm, Ranking, Scores};
use crate::scalar::{ordered_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    AWins,
    BWins,
    Tie,
}

impl Verdict {
    pub fn mirror(self) -> Self {
        match self {
            Verdict::AWins => Verdict::BWins,
            Verdict::BWins => Verdict::AWins,
            Verdict::Tie => Verdict::Tie,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseOutcome<T> {
    /// Node indices `(a, b)`; `(0, 1)` when computed from bare rows.
    pub pair: (usize, usize),
    pub weights: WeightVector<T>,
    pub utility_a: T,
    pub utility_b: T,
    /// `utility_a - utility_b`.
    pub delta: T,
    pub verdict: Verdict,
}

fn check_lengths<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix {
            nodes: 2,
            attributes: 0,
        });
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `w_i = d_i^2 / sum d^2`; uniform when the rows are identical.
pub fn pair_weights<T: Scalar>(row_a: &[T], row_b: &[T]) -> Result<WeightVector<T>> {
    check_lengths(row_a, row_b)?;
    Ok(pair_weights_unchecked(row_a, row_b))
}

fn pair_weights_unchecked<T: Scalar>(row_a: &[T], row_b: &[T]) -> WeightVector<T> {
    let sq: Vec<T> = row_a
        .iter()
        .zip(row_b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .collect();
    let total = ordered_sum(sq.iter().copied());
    if total == T::zero() {
        return WeightVector::uniform(row_a.len());
    }
    WeightVector(sq.into_iter().map(|s| s / total).collect())
}

pub fn pair_utilities<T: Scalar>(row_a: &[T], row_b: &[T]) -> Result<PairwiseOutcome<T>> {
    check_lengths(row_a, row_b)?;
    Ok(outcome((0, 1), row_a, row_b))
}

fn outcome<T: Scalar>(pair: (usize, usize), row_a: &[T], row_b: &[T]) -> PairwiseOutcome<T> {
    let weights = pair_weights_unchecked(row_a, row_b);
    let utility_a = weighted_sum(weights.as_slice(), row_a);
    let utility_b = weighted_sum(weights.as_slice(), row_b);
    let delta = utility_a - utility_b;
    let verdict = if delta > T::zero() {
        Verdict::AWins
    } else if delta < T::zero() {
        Verdict::BWins
    } else {
        Verdict::Tie
    };
    PairwiseOutcome {
        pair,
        weights,
        utility_a,
        utility_b,
        delta,
        verdict,
    }
}

/// Pairwise comparator over a normalized matrix that counts its calls.
#[derive(Debug)]
pub struct Comparator<'a, T> {
    norm: &'a NormalizedMatrix<T>,
    calls: Cell<u64>,
}

impl<'a, T: Scalar> Comparator<'a, T> {
    pub fn new(norm: &'a NormalizedMatrix<T>) -> Self {
        Self {
            norm,
            calls: Cell::new(0),
        }
    }

    pub fn compare(&self, a: usize, b: usize) -> PairwiseOutcome<T> {
        self.calls.set(self.calls.get() + 1);
        outcome((a, b), self.norm.row(a), self.norm.row(b))
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn matrix(&self) -> &'a NormalizedMatrix<T> {
        self.norm
    }
}

/// Variance of one attribute between every pair of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceMatrix<T> {
    pub attribute: usize,
    m: usize,
    values: Vec<T>,
}

impl<T: Scalar> VarianceMatrix<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        self.values[a * self.m + b]
    }
}

pub fn variance_matrix<T: Scalar>(norm: &NormalizedMatrix<T>, attribute: usize) -> Result<VarianceMatrix<T>> {
    if attribute >= norm.n() {
        return Err(Error::AttributeOutOfRange {
            index: attribute,
            attributes: norm.n(),
        });
    }
    let m = norm.m();
    let col: Vec<T> = norm.column(attribute).collect();
    let mut values = vec![T::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                values[a * m + b] = population_variance(&[col[a], col[b]]);
            }
        }
    }
    Ok(VarianceMatrix {
        attribute,
        m,
        values,
    })
}

/// Every pairwise outcome `(a, b)` with `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable<T> {
    m: usize,
    outcomes: Vec<PairwiseOutcome<T>>,
}

fn pair_slot(m: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < m);
    // rows 0..a contribute (m-1) + (m-2) + ... + (m-a)
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

impl<T: Scalar> OutcomeTable<T> {
    /// Round-robin over all `m(m-1)/2` pairs.
    pub fn compute(cmp: &Comparator<'_, T>) -> Self {
        let m = cmp.matrix().m();
        let mut outcomes = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                outcomes.push(cmp.compare(a, b));
            }
        }
        Self { m, outcomes }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Outcome stored for the unordered pair; `pair` inside is `(min, max)`.
    pub fn get(&self, a: usize, b: usize) -> &PairwiseOutcome<T> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        &self.outcomes[pair_slot(self.m, lo, hi)]
    }

    /// Verdict from `a`'s point of view.
    pub fn verdict(&self, a: usize, b: usize) -> Verdict {
        let v = self.get(a, b).verdict;
        if a < b {
            v
        } else {
            v.mirror()
        }
    }

    pub fn beats(&self, a: usize, b: usize) -> bool {
        a != b && self.verdict(a, b) == Verdict::AWins
    }

    pub fn wins(&self) -> Vec<usize> {
        let mut wins = vec![0; self.m];
        for o in &self.outcomes {
            match o.verdict {
                Verdict::AWins => wins[o.pair.0] += 1,
                Verdict::BWins => wins[o.pair.1] += 1,
                Verdict::Tie => {}
            }
        }
        wins
    }

    pub fn iter(&self) -> impl Iterator<Item = &PairwiseOutcome<T>> {
        self.outcomes.iter()
    }

    /// First intransitive triple, scanning index triples `a < b < c` in
    /// lexicographic order. The result `(x, y, z)` satisfies x beats y,
    /// y beats z, z beats x.
    pub fn find_cycle(&self) -> Option<(usize, usize, usize)> {
        let m = self.m;
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    if self.beats(a, b) && self.beats(b, c) && self.beats(c, a) {
                        return Some((a, b, c));
                    }
                    if self.beats(a, c) && self.beats(c, b) && self.beats(b, a) {
                        return Some((a, c, b));
                    }
                }
            }
        }
        None
    }

    /// True when no pair contradicts `order` (best first).
    pub fn consistent_with(&self, order: &[usize]) -> bool {
        order
            .iter()
            .enumerate()
            .all(|(p, &hi)| order[p + 1..].iter().all(|&lo| !self.beats(lo, hi)))
    }

    fn recompute_node(&mut self, cmp: &Comparator<'_, T>, x: usize) {
        for other in 0..self.m {
            if other == x {
                continue;
            }
            let (a, b) = if other < x { (other, x) } else { (x, other) };
            self.outcomes[pair_slot(self.m, a, b)] = cmp.compare(a, b);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmadmOptions {
    /// Largest `m` for which the exhaustive O(m^3) triple scan runs.
    pub cycle_scan_cap: usize,
    /// Scan every triple regardless of the cap.
    pub force_exhaustive: bool,
}

impl Default for PmadmOptions {
    fn default() -> Self {
        Self {
            cycle_scan_cap: 64,
            force_exhaustive: false,
        }
    }
}

/// A PMADM evaluation together with the state needed for incremental
/// updates: the frozen normalization and the full outcome table.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseRun<T> {
    pub norm: NormalizedMatrix<T>,
    pub table: OutcomeTable<T>,
    pub ranking: Ranking<T>,
    /// Set when an update had to clamp values into the frozen domain.
    pub clamped: bool,
    pub options: PmadmOptions,
}

fn ranking_from_table<T: Scalar>(
    norm: &NormalizedMatrix<T>,
    table: &OutcomeTable<T>,
    options: PmadmOptions,
    comparisons: u64,
) -> Ranking<T> {
    let m = norm.m();
    let wins = table.wins();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| wins[b].cmp(&wins[a]).then(a.cmp(&b)));
    let cycle_detected = if options.force_exhaustive || m <= options.cycle_scan_cap {
        table.find_cycle().is_some()
    } else {
        !table.consistent_with(&order)
    };
    let tie_groups = adjacent_groups(&order, |a, b| wins[a] == wins[b]);
    Ranking {
        algorithm: Algorithm::Pmadm,
        node_ids: norm.node_ids().to_vec(),
        order,
        scores: Scores::Wins(wins),
        comparison_count: comparisons,
        utility_evaluation_count: 2 * comparisons,
        cycle_detected,
        tie_groups,
    }
}

impl<T: Scalar> PairwiseRun<T> {
    pub fn new(norm: NormalizedMatrix<T>, options: PmadmOptions) -> Self {
        let cmp = Comparator::new(&norm);
        let table = OutcomeTable::compute(&cmp);
        let ranking = ranking_from_table(&norm, &table, options, cmp.calls());
        Self {
            norm,
            table,
            ranking,
            clamped: false,
            options,
        }
    }

    /// Replaces one node's raw row and recomputes only the `m - 1` outcomes
    /// that involve it. Normalization constants stay frozen; out-of-range
    /// values are clamped and reported through [`PairwiseRun::clamped`].
    pub fn update_node(&self, node_id: &str, raw_row: &[T]) -> Result<Self> {
        let x = self
            .norm
            .node_index(node_id)
            .ok_or_else(|| Error::UnknownNode(node_id.to_string()))?;
        let (norm, clamped) = self.norm.with_raw_row(x, raw_row)?;
        Ok(self.replace_normalized(x, norm, clamped))
    }

    /// Same as [`PairwiseRun::update_node`] for an already-normalized row.
    pub fn update_node_normalized(&self, x: usize, row: &[T]) -> Result<Self> {
        let norm = self.norm.with_normalized_row(x, row)?;
        Ok(self.replace_normalized(x, norm, false))
    }

    fn replace_normalized(&self, x: usize, norm: NormalizedMatrix<T>, clamped: bool) -> Self {
        let mut table = self.table.clone();
        let cmp = Comparator::new(&norm);
        table.recompute_node(&cmp, x);
        let ranking = ranking_from_table(&norm, &table, self.options, cmp.calls());
        Self {
            norm,
            table,
            ranking,
            clamped,
            options: self.options,
        }
    }
}

pub fn pmadm_rank<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<Ranking<T>> {
    Ok(pmadm_rank_normalized(&normalize(matrix, scheme)?))
}

pub fn pmadm_rank_normalized<T: Scalar>(norm: &NormalizedMatrix<T>) -> Ranking<T> {
    PairwiseRun::new(norm.clone(), PmadmOptions::default()).ranking
}

pub fn pmadm_run<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme, options: PmadmOptions) -> Result<PairwiseRun<T>> {
    Ok(PairwiseRun::new(normalize(matrix, scheme)?, options))
}

/// Exhaustive search for an intransitive triple; `None` when `m < 3`.
pub fn find_cycle<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<Option<(usize, usize, usize)>> {
    Ok(find_cycle_normalized(&normalize(matrix, scheme)?))
}

pub fn find_cycle_normalized<T: Scalar>(norm: &NormalizedMatrix<T>) -> Option<(usize, usize, usize)> {
    if norm.m() < 3 {
        return None;
    }
    OutcomeTable::compute(&Comparator::new(norm)).find_cycle()
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn closed_form(a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        d.iter().map(|x| x * x * x).sum::<f64>() / d.iter().map(|x| x * x).sum::<f64>()
    }

    #[test]
    fn identical_rows_tie_with_uniform_weights() {
        let o = pair_utilities(&[0.3, 0.4, 0.5], &[0.3, 0.4, 0.5]).unwrap();
        assert_eq!(o.verdict, Verdict::Tie);
        assert_eq!(o.delta, 0.0);
        assert_eq!(o.weights.0, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn symmetric_differences_share_weight() {
        let w = pair_weights(&[0.5, 0.9], &[0.2, 0.6]).unwrap();
        assert_abs_diff_eq!(w.0[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.0[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn routing_example_pair_weights_nodes_1_and_3() {
        let a = [101.0 / 103.0, 0.1 / 0.9];
        let b = [1.0, 1.0];
        let w = pair_weights(&a, &b).unwrap();
        assert_abs_diff_eq!(w.0[0], 4.772e-4, epsilon = 1e-6);
        assert_abs_diff_eq!(w.0[1], 0.99952, epsilon = 1e-5);
    }

    #[test]
    fn single_attribute_delta_is_the_gap() {
        let o = pair_utilities(&[0.9], &[0.2]).unwrap();
        assert_abs_diff_eq!(o.delta, 0.7, epsilon = 1e-15);
        assert_eq!(o.verdict, Verdict::AWins);
        let o = pair_utilities(&[1.0], &[1.0 / 9.0]).unwrap();
        assert_abs_diff_eq!(o.delta, 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn delta_matches_cubic_closed_form() {
        let a = [0.2, 0.9, 0.4, 0.35];
        let b = [0.7, 0.1, 0.45, 0.3];
        let o = pair_utilities(&a, &b).unwrap();
        assert_abs_diff_eq!(o.delta, closed_form(&a, &b), epsilon = 1e-12);
        assert_abs_diff_eq!(o.weights.sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            pair_utilities(&[0.1, 0.2], &[0.1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(pair_weights::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn variance_matrix_examples() {
        let norm = NormalizedMatrix::from_rows(vec![vec![0.0, 0.5], vec![1.0, 0.5]]).unwrap();
        let v = variance_matrix(&norm, 0).unwrap();
        assert_eq!(v.get(0, 1), 0.25);
        assert_eq!(v.get(1, 0), 0.25);
        assert_eq!(v.get(0, 0), 0.0);
        let v = variance_matrix(&norm, 1).unwrap();
        assert_eq!(v.get(0, 1), 0.0);
        assert!(matches!(
            variance_matrix(&norm, 2),
            Err(Error::AttributeOutOfRange { index: 2, .. })
        ));

        let t1 = DecisionMatrix::from_columns(vec![vec![0.1, 0.2, 0.3, 0.4, 0.9]]).unwrap();
        let norm = normalize(&t1, Scheme::Max).unwrap();
        let v = variance_matrix(&norm, 0).unwrap();
        assert_abs_diff_eq!(v.get(0, 4), 16.0 / 81.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_slots_are_dense() {
        let m = 7;
        let mut seen = vec![false; m * (m - 1) / 2];
        for a in 0..m {
            for b in a + 1..m {
                let s = pair_slot(m, a, b);
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.into_iter().all(|x| x));
    }

    #[test]
    fn pmadm_counts_and_single_attribute_order() {
        let t1 = DecisionMatrix::from_columns(vec![vec![0.1, 0.2, 0.3, 0.4, 0.9]]).unwrap();
        let r = pmadm_rank(&t1, Scheme::Max).unwrap();
        assert_eq!(r.comparison_count, 10);
        assert_eq!(r.utility_evaluation_count, 20);
        assert_eq!(r.ordered_ids(), vec!["N5", "N4", "N3", "N2", "N1"]);
        assert!(!r.cycle_detected);
        assert!(find_cycle(&t1, Scheme::Max).unwrap().is_none());
    }

    #[test]
    fn identical_rows_have_no_cycle_and_tie() {
        let m = DecisionMatrix::from_rows(vec![vec![0.5, 0.5]; 3]).unwrap();
        assert!(find_cycle(&m, Scheme::Max).unwrap().is_none());
        let r = pmadm_rank(&m, Scheme::Max).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
        assert_eq!(r.tie_groups, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn update_with_same_row_is_identity() {
        let m = DecisionMatrix::from_rows(vec![
            vec![0.2, 0.9, 0.4],
            vec![0.8, 0.1, 0.3],
            vec![0.5, 0.5, 0.9],
            vec![0.1, 0.6, 0.7],
            vec![0.9, 0.3, 0.2],
        ])
        .unwrap();
        let run = pmadm_run(&m, Scheme::Max, PmadmOptions::default()).unwrap();
        let again = run.update_node("N5", m.row(4)).unwrap();
        assert_eq!(again.table, run.table);
        assert_eq!(again.ranking.order, run.ranking.order);
        assert_eq!(again.ranking.comparison_count, 4);
        assert!(!again.clamped);
        assert!(matches!(run.update_node("N9", m.row(0)), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn update_clamps_out_of_domain_values() {
        let m = DecisionMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.5, 1.5]]).unwrap();
        let run = pmadm_run(&m, Scheme::Max, PmadmOptions::default()).unwrap();
        let up = run.update_node("N3", &[5.0, 1.5]).unwrap();
        assert!(up.clamped);
        assert_eq!(up.norm.row(2)[0], 1.0);
    }
}
