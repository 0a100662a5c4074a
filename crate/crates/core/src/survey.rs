//! Monte-Carlo checks over seeded random instances: intransitive triples,
//! agreement between the partitioning and round-robin rankers, and
//! single-node stability.

use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{normalize, Scheme};
use crate::error::{Error, Result};
use crate::matrix_file::write_matrix;
use crate::pairwise::{pmadm_rank_normalized, Comparator, OutcomeTable};
use crate::random::{random_matrix, rng};
use crate::sensitivity::stability_normalized;
use crate::tree_ranker::{lpmadm_rank_normalized, PivotStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub trials: u64,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Where to write counterexample matrices; nothing is written when unset.
    pub fixture_dir: Option<PathBuf>,
    pub max_fixtures: usize,
}

impl SurveyConfig {
    pub fn new(trials: u64, m: usize, n: usize, seed: u64) -> Self {
        Self {
            trials,
            m,
            n,
            seed,
            fixture_dir: None,
            max_fixtures: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: u64,
    pub passed: u64,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        self.passed += u64::from(ok);
    }

    pub fn failed(&self) -> u64 {
        self.checked - self.passed
    }

    /// Pass rate; 1 when nothing was checked.
    pub fn rate(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            self.passed as f64 / self.checked as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub trials: u64,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Passed = no intransitive triple.
    pub transitivity: Tally,
    pub cycle_rate: f64,
    /// Instances without a cycle where every pivot strategy reproduced the
    /// round-robin order.
    pub order_equality: Tally,
    /// Outcomes among untouched nodes stayed bit-identical.
    pub pmadm_stability: Tally,
    /// Weighted-sum order of untouched nodes stayed the same (informational).
    pub madm_stability: Tally,
    pub first_cycle: Option<FirstCycle>,
    pub counterexample_fixtures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstCycle {
    pub trial: u64,
    /// Node ids `(x, y, z)` with x beating y, y beating z and z beating x.
    pub nodes: (String, String, String),
}

pub const STRATEGIES: [PivotStrategy; 4] = [
    PivotStrategy::Random(0),
    PivotStrategy::MadmPresequence,
    PivotStrategy::AvgOrderPresequence,
    PivotStrategy::OracleMedian,
];

pub fn run_survey(config: &SurveyConfig) -> Result<SurveySummary> {
    if config.trials == 0 || config.m == 0 || config.n == 0 {
        return Err(Error::InvalidArgument("trials, m and n must be positive".into()));
    }
    let mut rng = rng(config.seed);
    let mut s = SurveySummary {
        trials: config.trials,
        m: config.m,
        n: config.n,
        seed: config.seed,
        transitivity: Tally::default(),
        cycle_rate: 0.0,
        order_equality: Tally::default(),
        pmadm_stability: Tally::default(),
        madm_stability: Tally::default(),
        first_cycle: None,
        counterexample_fixtures: Vec::new(),
    };
    for trial in 0..config.trials {
        let matrix = random_matrix::<f64, _>(&mut rng, config.m, config.n);
        let norm = normalize(&matrix, Scheme::Max)?;
        let table = OutcomeTable::compute(&Comparator::new(&norm));
        let cycle = if config.m >= 3 { table.find_cycle() } else { None };
        s.transitivity.record(cycle.is_none());

        match cycle {
            Some((x, y, z)) => {
                let ids = norm.node_ids();
                if s.first_cycle.is_none() {
                    s.first_cycle = Some(FirstCycle {
                        trial,
                        nodes: (ids[x].clone(), ids[y].clone(), ids[z].clone()),
                    });
                }
                if let Some(dir) = &config.fixture_dir {
                    if s.counterexample_fixtures.len() < config.max_fixtures {
                        let path = fixture_path(dir, config, trial);
                        write_matrix(&path, &matrix)?;
                        s.counterexample_fixtures.push(path.display().to_string());
                    }
                }
            }
            None => {
                let want = pmadm_rank_normalized(&norm).order;
                let same = STRATEGIES.iter().all(|&p| {
                    let p = match p {
                        PivotStrategy::Random(_) => PivotStrategy::Random(config.seed ^ trial),
                        other => other,
                    };
                    lpmadm_rank_normalized(&norm, p).0.order == want
                });
                s.order_equality.record(same);
            }
        }

        let x = rng.gen_range(0..config.m);
        let row: Vec<f64> = (0..config.n).map(|_| rng.gen::<f64>()).collect();
        let (after, _) = norm.with_raw_row(x, &row)?;
        let verdict = stability_normalized(&norm, &after, x)
            .stability
            .expect("stability report carries a verdict");
        s.pmadm_stability.record(verdict.pmadm_stable);
        s.madm_stability.record(verdict.madm_stable);
    }
    s.cycle_rate = s.transitivity.failed() as f64 / s.trials as f64;
    Ok(s)
}

fn fixture_path(dir: &Path, config: &SurveyConfig, trial: u64) -> PathBuf {
    dir.join(format!(
        "cycle_m{}_n{}_seed{}_trial{}.csv",
        config.m, config.n, config.seed, trial
    ))
}
