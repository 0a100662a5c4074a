//! Command-line front end: ranks matrix files, analyzes decomposing trees,
//! runs counter sweeps and Monte-Carlo checks.

pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pmadm_core::bench::{format_table, run_sweep, BenchAlgorithm, BenchConfig};
use pmadm_core::matrix_file::read_matrix;
use pmadm_core::survey::{run_survey, SurveyConfig};
use pmadm_core::tree::{optimal_tree, tree_metrics};
use pmadm_core::tree_ranker::lpmadm_rank_normalized;
use pmadm_core::{madm_rank, normalize, pmadm_rank, DecisionMatrix, Error, PivotStrategy, Scheme};

use report::{RankReport, ReportFile, TreeReport};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Debug, Parser)]
#[command(name = "pmadm", version, about = "Pairwise multi-attribute decision making")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the nodes of a matrix file.
    Rank(RankArgs),
    /// Report the balanced decomposing tree of M nodes.
    AnalyzeTree(AnalyzeArgs),
    /// Counter sweep over random instances, as a comma-separated table.
    Bench(BenchArgs),
    /// Monte-Carlo check of transitivity, ranker agreement and stability.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Madm,
    Pmadm,
    Lpmadm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Max,
    Minmax,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Max => Scheme::Max,
            SchemeArg::Minmax => Scheme::MinMax,
        }
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Matrix file: `id,<attr>...` header, optional `#direction` row.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pmadm")]
    pub algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "max")]
    pub scheme: SchemeArg,
    /// lPMADM pivot rule: random:SEED, madm, avg-order or oracle-median.
    #[arg(long, default_value = "madm")]
    pub pivot: PivotStrategy,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub m_min: usize,
    #[arg(long)]
    pub m_max: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Attributes per node.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated: madm, pmadm, lpmadm, lpmadm:<pivot>.
    #[arg(long, value_delimiter = ',', default_value = "madm,pmadm,lpmadm")]
    pub algorithms: Vec<BenchAlgorithm>,
    /// Write 0 for wall time, making the table reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write matrices with intransitive triples here.
    #[arg(long)]
    pub fixture_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub max_fixtures: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    Input(String),
    /// A broken internal invariant.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::SameNode(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// What a command produced and where it goes.
pub struct Output {
    pub text: String,
    pub path: Option<PathBuf>,
}

pub fn execute(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Rank(a) => {
            let matrix: DecisionMatrix<f64> =
                read_matrix(&a.input).map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
            let report = rank(&matrix, a.algorithm, a.scheme, a.pivot)?;
            Ok(Output {
                text: ReportFile::Rank(report).to_json(),
                path: a.output,
            })
        }
        Command::AnalyzeTree(a) => Ok(Output {
            text: ReportFile::AnalyzeTree(analyze_tree(a.m)?).to_json(),
            path: a.output,
        }),
        Command::Bench(a) => {
            let rows = run_sweep(&BenchConfig {
                m_min: a.m_min,
                m_max: a.m_max,
                step: a.step,
                n: a.n,
                seed: a.seed,
                algorithms: a.algorithms,
                timing: !a.no_timing,
            })?;
            Ok(Output {
                text: format_table(&rows),
                path: a.output,
            })
        }
        Command::Verify(a) => {
            let summary = run_survey(&SurveyConfig {
                trials: a.trials,
                m: a.m,
                n: a.n,
                seed: a.seed,
                fixture_dir: a.fixture_dir,
                max_fixtures: a.max_fixtures,
            })?;
            if summary.pmadm_stability.failed() > 0 {
                return Err(CliError::Internal(format!(
                    "pairwise outcomes changed for untouched nodes in {} trials",
                    summary.pmadm_stability.failed()
                )));
            }
            Ok(Output {
                text: ReportFile::Verify(summary).to_json(),
                path: a.output,
            })
        }
    }
}

pub fn rank(
    matrix: &DecisionMatrix<f64>,
    algorithm: AlgorithmArg,
    scheme: SchemeArg,
    pivot: PivotStrategy,
) -> Result<RankReport, CliError> {
    let scheme_name = Scheme::from(scheme).to_string();
    Ok(match algorithm {
        AlgorithmArg::Madm => RankReport::new(&madm_rank(matrix, scheme.into())?, &scheme_name, None, None),
        AlgorithmArg::Pmadm => RankReport::new(&pmadm_rank(matrix, scheme.into())?, &scheme_name, None, None),
        AlgorithmArg::Lpmadm => {
            let norm = normalize(matrix, scheme.into())?;
            let (ranking, tree) = lpmadm_rank_normalized(&norm, pivot);
            if ranking.comparison_count != tree.comparison_cost() {
                return Err(CliError::Internal("comparison counter disagrees with the decomposing tree".into()));
            }
            RankReport::new(&ranking, &scheme_name, Some(pivot.to_string()), Some(&tree))
        }
    })
}

pub fn analyze_tree(m: usize) -> Result<TreeReport, CliError> {
    if m < 2 {
        return Err(CliError::Input(format!("--m must be at least 2 (got {m})")));
    }
    Ok(TreeReport::new(tree_metrics(m)?, &optimal_tree(m)))
}
