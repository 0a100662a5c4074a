//! Counter sweeps over random instances.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{madm_rank_normalized, normalize, Scheme};
use crate::error::{Error, Result};
use crate::pairwise::pmadm_rank_normalized;
use crate::random::{random_matrix, rng};
use crate::tree_ranker::{lpmadm_rank_normalized, PivotStrategy};

pub const BENCH_COLUMNS: &str = "m,algorithm,comparisons,utility_evaluations,wall_time_ns";

/// Comment lines describing the counters, written above the table.
pub const BENCH_HEADER: &str = "\
# utility_evaluations counts weighted-sum evaluations: one per node for madm,
# two per pairwise comparison for pmadm and lpmadm (so pmadm = m(m-1)).
# comparisons counts pairwise comparator calls (0 for madm).
# Instances: entries uniform in (0,1), all benefit, max normalization.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchAlgorithm {
    Madm,
    Pmadm,
    Lpmadm(PivotStrategy),
}

impl BenchAlgorithm {
    pub fn label(&self) -> String {
        match self {
            BenchAlgorithm::Madm => "madm".into(),
            BenchAlgorithm::Pmadm => "pmadm".into(),
            BenchAlgorithm::Lpmadm(p) => format!("lpmadm:{p}"),
        }
    }
}

impl std::str::FromStr for BenchAlgorithm {
    type Err = String;

    /// `madm`, `pmadm`, `lpmadm` (madm pre-sequence) or `lpmadm:<pivot>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "madm" => Ok(Self::Madm),
            "pmadm" => Ok(Self::Pmadm),
            "lpmadm" => Ok(Self::Lpmadm(PivotStrategy::MadmPresequence)),
            other => match other.strip_prefix("lpmadm:") {
                Some(p) => p.parse().map(Self::Lpmadm),
                None => Err(format!("unknown algorithm `{other}`")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub m_min: usize,
    pub m_max: usize,
    pub step: usize,
    pub n: usize,
    pub seed: u64,
    pub algorithms: Vec<BenchAlgorithm>,
    /// Record wall time; when off the column is 0 and output is reproducible.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub m: usize,
    pub algorithm: String,
    pub comparisons: u64,
    pub utility_evaluations: u64,
    pub wall_time_ns: u128,
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.m, self.algorithm, self.comparisons, self.utility_evaluations, self.wall_time_ns
        )
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.m_min == 0 || self.m_min > self.m_max {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= m-min <= m-max (got {}..{})",
                self.m_min, self.m_max
            )));
        }
        if self.step == 0 {
            return Err(Error::InvalidArgument("step must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("need at least one attribute".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithms selected".into()));
        }
        Ok(())
    }
}

/// Per-`m` stream, so a row does not depend on the rest of the sweep.
fn instance_rng(seed: u64, m: usize) -> ChaCha8Rng {
    let mut r = rng(seed);
    r.set_stream(m as u64);
    r
}

pub fn run_sweep(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for m in (config.m_min..=config.m_max).step_by(config.step) {
        let matrix = random_matrix::<f64, _>(&mut instance_rng(config.seed, m), m, config.n);
        let norm = normalize(&matrix, Scheme::Max)?;
        for alg in &config.algorithms {
            let start = Instant::now();
            let ranking = match alg {
                BenchAlgorithm::Madm => madm_rank_normalized(&norm),
                BenchAlgorithm::Pmadm => pmadm_rank_normalized(&norm),
                BenchAlgorithm::Lpmadm(p) => lpmadm_rank_normalized(&norm, *p).0,
            };
            let elapsed = start.elapsed().as_nanos();
            rows.push(BenchRow {
                m,
                algorithm: alg.label(),
                comparisons: ranking.comparison_count,
                utility_evaluations: ranking.utility_evaluation_count,
                wall_time_ns: if config.timing { elapsed } else { 0 },
            });
        }
    }
    Ok(rows)
}

/// Header comments, column line and rows.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n{BENCH_COLUMNS}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}
