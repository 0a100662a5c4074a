//! Decision matrices, normalization, variance-based weights and the
//! traditional MADM (simple additive weighting) ranking.
//!
//! Everything downstream of [`normalize`] assumes larger-is-better values in
//! `[0, 1]`; cost attributes are inverted here.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{adjacent_groups, Algorithm, Ranking, Scores};
use crate::scalar::{ordered_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Benefit,
    Cost,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "benefit" => Ok(Direction::Benefit),
            "cost" => Ok(Direction::Cost),
            other => Err(format!("unknown direction `{other}` (expected benefit|cost)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub direction: Direction,
}

impl AttributeSpec {
    pub fn benefit(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Benefit,
        }
    }

    pub fn cost(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Cost,
        }
    }
}

/// `m` candidate nodes by `n` attributes of raw values, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix<T> {
    node_ids: Vec<String>,
    attributes: Vec<AttributeSpec>,
    values: Vec<T>,
}

impl<T: Scalar> DecisionMatrix<T> {
    pub fn new(
        node_ids: Vec<String>,
        attributes: Vec<AttributeSpec>,
        rows: Vec<Vec<T>>,
    ) -> Result<Self> {
        let m = node_ids.len();
        let n = attributes.len();
        if m == 0 || n == 0 {
            return Err(Error::EmptyMatrix {
                nodes: m,
                attributes: n,
            });
        }
        if rows.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: rows.len(),
            });
        }
        let mut seen = HashSet::new();
        for id in &node_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateNode(id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for a in &attributes {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::DuplicateAttribute(a.name.clone()));
            }
        }
        let mut values = Vec::with_capacity(m * n);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow {
                    row: j,
                    expected: n,
                    found: row.len(),
                });
            }
            for (i, v) in row.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: j, column: i });
                }
                values.push(v);
            }
        }
        Ok(Self {
            node_ids,
            attributes,
            values,
        })
    }

    /// All-benefit matrix with ids `N1..Nm` and attributes `P1..Pn`.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        Self::new(default_node_ids(m), default_attributes(n), rows)
    }

    /// All-benefit matrix given column-wise, the layout used by tables that
    /// list one attribute per row.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.len();
        let m = columns.first().map_or(0, Vec::len);
        let mut rows = vec![Vec::with_capacity(n); m];
        for (i, col) in columns.iter().enumerate() {
            if col.len() != m {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: m,
                    found: col.len(),
                });
            }
            for (j, &v) in col.iter().enumerate() {
                rows[j].push(v);
            }
        }
        Self::from_rows(rows)
    }

    pub fn m(&self) -> usize {
        self.node_ids.len()
    }

    pub fn n(&self) -> usize {
        self.attributes.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn row(&self, j: usize) -> &[T] {
        let n = self.n();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn value(&self, j: usize, i: usize) -> T {
        self.values[j * self.n() + i]
    }

    pub fn column(&self, i: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().skip(i).step_by(self.n()).copied()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|x| x == id)
    }

    /// Copy of the matrix with row `j` replaced.
    pub fn with_row(&self, j: usize, row: &[T]) -> Result<Self> {
        if j >= self.m() {
            return Err(Error::NodeOutOfRange {
                index: j,
                nodes: self.m(),
            });
        }
        check_row(row, self.n(), j)?;
        let mut out = self.clone();
        let n = self.n();
        out.values[j * n..(j + 1) * n].copy_from_slice(row);
        Ok(out)
    }
}

pub(crate) fn default_node_ids(m: usize) -> Vec<String> {
    (1..=m).map(|j| format!("N{j}")).collect()
}

fn default_attributes(n: usize) -> Vec<AttributeSpec> {
    (1..=n).map(|i| AttributeSpec::benefit(format!("P{i}"))).collect()
}

fn check_row<T: Scalar>(row: &[T], n: usize, j: usize) -> Result<()> {
    if row.len() != n {
        return Err(Error::RaggedRow {
            row: j,
            expected: n,
            found: row.len(),
        });
    }
    if let Some(i) = row.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: j, column: i });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Benefit `v / max`, cost `min / v`.
    #[default]
    Max,
    /// Benefit `(v - min) / (max - min)`, cost `(max - v) / (max - min)`.
    MinMax,
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "max" => Ok(Scheme::Max),
            "minmax" | "min-max" => Ok(Scheme::MinMax),
            other => Err(format!("unknown normalization scheme `{other}`")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Max => "max",
            Scheme::MinMax => "minmax",
        })
    }
}

/// Frozen per-column normalization constants.
///
/// Re-applying a scale to a value that was part of the original column gives
/// the bit-identical normalized value; values outside the original range are
/// clamped into `[0, 1]` and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnScale<T> {
    pub scheme: Scheme,
    pub direction: Direction,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> ColumnScale<T> {
    /// Identity scale for values already in `[0, 1]`.
    pub fn identity() -> Self {
        Self {
            scheme: Scheme::Max,
            direction: Direction::Benefit,
            min: T::zero(),
            max: T::one(),
        }
    }

    /// Returns the normalized value and whether it had to be clamped.
    pub fn apply(&self, v: T) -> (T, bool) {
        let (zero, one) = (T::zero(), T::one());
        let raw = match (self.scheme, self.direction) {
            (Scheme::Max, Direction::Benefit) => {
                if self.max == zero {
                    // all-zero column maps to 1
                    if v == zero {
                        one
                    } else if v > zero {
                        T::infinity()
                    } else {
                        T::neg_infinity()
                    }
                } else {
                    v / self.max
                }
            }
            (Scheme::Max, Direction::Cost) => {
                if v <= zero {
                    T::infinity()
                } else {
                    self.min / v
                }
            }
            (Scheme::MinMax, dir) => {
                let range = self.max - self.min;
                let signed = match dir {
                    Direction::Benefit => v - self.min,
                    Direction::Cost => self.max - v,
                };
                if range == zero {
                    if signed > zero {
                        T::infinity()
                    } else if signed < zero {
                        T::neg_infinity()
                    } else {
                        zero
                    }
                } else {
                    signed / range
                }
            }
        };
        if raw > one {
            (one, true)
        } else if raw < zero {
            (zero, true)
        } else {
            (raw, false)
        }
    }
}

/// Normalized matrix: every value in `[0, 1]`, larger is better.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix<T> {
    node_ids: Vec<String>,
    n: usize,
    values: Vec<T>,
    scheme: Scheme,
    scales: Vec<ColumnScale<T>>,
}

impl<T: Scalar> NormalizedMatrix<T> {
    /// Wraps values that are already normalized. Ids default to `N1..Nm`.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::EmptyMatrix {
                nodes: m,
                attributes: n,
            });
        }
        let mut values = Vec::with_capacity(m * n);
        for (j, row) in rows.into_iter().enumerate() {
            check_row(&row, n, j)?;
            for (i, v) in row.into_iter().enumerate() {
                if v < T::zero() || v > T::one() {
                    return Err(Error::Degenerate {
                        attribute: format!("P{}", i + 1),
                        reason: format!("normalized value {v} at row {j} outside [0, 1]"),
                    });
                }
                values.push(v);
            }
        }
        Ok(Self {
            node_ids: default_node_ids(m),
            n,
            values,
            scheme: Scheme::Max,
            scales: vec![ColumnScale::identity(); n],
        })
    }

    pub fn m(&self) -> usize {
        self.node_ids.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn scales(&self) -> &[ColumnScale<T>] {
        &self.scales
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn value(&self, j: usize, i: usize) -> T {
        self.values[j * self.n + i]
    }

    pub fn column(&self, i: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().skip(i).step_by(self.n).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks(self.n)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|x| x == id)
    }

    /// Normalizes a raw row with the frozen column constants.
    /// The flag is set when any value had to be clamped.
    pub fn normalize_row(&self, raw: &[T]) -> Result<(Vec<T>, bool)> {
        check_row(raw, self.n, self.m())?;
        let mut clamped = false;
        let row = raw
            .iter()
            .zip(&self.scales)
            .map(|(&v, s)| {
                let (x, c) = s.apply(v);
                clamped |= c;
                x
            })
            .collect();
        Ok((row, clamped))
    }

    /// Copy with row `j` replaced by an already-normalized row.
    pub fn with_normalized_row(&self, j: usize, row: &[T]) -> Result<Self> {
        if j >= self.m() {
            return Err(Error::NodeOutOfRange {
                index: j,
                nodes: self.m(),
            });
        }
        check_row(row, self.n, j)?;
        if let Some(i) = row.iter().position(|&v| v < T::zero() || v > T::one()) {
            return Err(Error::Degenerate {
                attribute: format!("P{}", i + 1),
                reason: "normalized value outside [0, 1]".into(),
            });
        }
        let mut out = self.clone();
        out.values[j * self.n..(j + 1) * self.n].copy_from_slice(row);
        Ok(out)
    }

    /// Copy with row `j` replaced by a raw row normalized with the frozen
    /// constants. Returns the clamp flag alongside.
    pub fn with_raw_row(&self, j: usize, raw: &[T]) -> Result<(Self, bool)> {
        let (row, clamped) = self.normalize_row(raw)?;
        Ok((self.with_normalized_row(j, &row)?, clamped))
    }
}

/// Maps every column onto `[0, 1]` with larger-is-better orientation.
pub fn normalize<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<NormalizedMatrix<T>> {
    let (m, n) = (matrix.m(), matrix.n());
    let mut scales = Vec::with_capacity(n);
    for (i, attr) in matrix.attributes().iter().enumerate() {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for v in matrix.column(i) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if scheme == Scheme::Max {
            match attr.direction {
                Direction::Benefit if lo < T::zero() => {
                    return Err(Error::Degenerate {
                        attribute: attr.name.clone(),
                        reason: format!(
                            "max normalization needs nonnegative benefit values (found {lo}); use min-max"
                        ),
                    })
                }
                Direction::Cost if lo == T::zero() => {
                    return Err(Error::Degenerate {
                        attribute: attr.name.clone(),
                        reason: "cost column contains 0, so min/v is undefined; use min-max".into(),
                    })
                }
                Direction::Cost if lo < T::zero() => {
                    return Err(Error::Degenerate {
                        attribute: attr.name.clone(),
                        reason: format!(
                            "max normalization needs positive cost values (found {lo}); use min-max"
                        ),
                    })
                }
                _ => {}
            }
        }
        scales.push(ColumnScale {
            scheme,
            direction: attr.direction,
            min: lo,
            max: hi,
        });
    }
    let mut values = Vec::with_capacity(m * n);
    for j in 0..m {
        for (i, s) in scales.iter().enumerate() {
            let (x, clamped) = s.apply(matrix.value(j, i));
            debug_assert!(!clamped, "original values never clamp");
            values.push(x);
        }
    }
    Ok(NormalizedMatrix {
        node_ids: matrix.node_ids().to_vec(),
        n,
        values,
        scheme,
        scales,
    })
}

/// Per-attribute population variance (divisor `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport<T>(pub Vec<T>);

impl<T: Scalar> VarianceReport<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// Attribute weights; nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(pub Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn uniform(n: usize) -> Self {
        Self(vec![T::one() / T::count(n); n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> T {
        ordered_sum(self.0.iter().copied())
    }
}

/// Population variance of a column. Constant columns give exactly zero.
pub(crate) fn population_variance<T: Scalar>(col: &[T]) -> T {
    let first = col[0];
    if col.iter().all(|&x| x == first) {
        return T::zero();
    }
    let m = T::count(col.len());
    let mean = ordered_sum(col.iter().copied()) / m;
    ordered_sum(col.iter().map(|&x| (x - mean) * (x - mean))) / m
}

pub fn variances<T: Scalar>(norm: &NormalizedMatrix<T>) -> VarianceReport<T> {
    VarianceReport(
        (0..norm.n())
            .map(|i| population_variance(&norm.column(i).collect::<Vec<_>>()))
            .collect(),
    )
}

/// `w_i = v_i / sum v`, or uniform weights when every variance is zero.
pub fn weights<T: Scalar>(report: &VarianceReport<T>) -> WeightVector<T> {
    let total = ordered_sum(report.0.iter().copied());
    if total == T::zero() {
        return WeightVector::uniform(report.0.len());
    }
    WeightVector(report.0.iter().map(|&v| v / total).collect())
}

/// Convenience: variance-based weights straight from a normalized matrix.
pub fn global_weights<T: Scalar>(norm: &NormalizedMatrix<T>) -> WeightVector<T> {
    weights(&variances(norm))
}

/// Weighted row sum of a single normalized row.
pub(crate) fn weighted_sum<T: Scalar>(w: &[T], row: &[T]) -> T {
    ordered_sum(w.iter().zip(row).map(|(&w, &x)| w * x))
}

pub fn madm_utilities<T: Scalar>(norm: &NormalizedMatrix<T>, w: &WeightVector<T>) -> Result<Vec<T>> {
    if w.len() != norm.n() {
        return Err(Error::DimensionMismatch {
            expected: norm.n(),
            found: w.len(),
        });
    }
    Ok(norm.rows().map(|row| weighted_sum(w.as_slice(), row)).collect())
}

/// Indices sorted by descending utility, ties by ascending index.
pub(crate) fn order_by_utility<T: Scalar>(utilities: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..utilities.len()).collect();
    order.sort_by(|&a, &b| {
        utilities[b]
            .partial_cmp(&utilities[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

pub fn madm_rank<T: Scalar>(matrix: &DecisionMatrix<T>, scheme: Scheme) -> Result<Ranking<T>> {
    Ok(madm_rank_normalized(&normalize(matrix, scheme)?))
}

pub fn madm_rank_normalized<T: Scalar>(norm: &NormalizedMatrix<T>) -> Ranking<T> {
    let w = global_weights(norm);
    let utilities = madm_utilities(norm, &w).expect("weights sized from the same matrix");
    let order = order_by_utility(&utilities);
    let tie_groups = adjacent_groups(&order, |a, b| utilities[a] == utilities[b]);
    Ranking {
        algorithm: Algorithm::Madm,
        node_ids: norm.node_ids().to_vec(),
        order,
        scores: Scores::Utility(utilities),
        comparison_count: 0,
        utility_evaluation_count: norm.m() as u64,
        cycle_detected: false,
        tie_groups,
    }
}
