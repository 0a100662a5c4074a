//! Pairwise multi-attribute decision making.
//!
//! * [`decision`]: decision matrices, normalization, variance-based weights and
//!   the classic weighted-sum (MADM) ranking.
//! * [`pairwise`]: the pairwise comparator and the round-robin (PMADM) ranking.
//! * [`tree_ranker`]: the quicksort-style (lPMADM) ranking and its pivot rules.
//! * [`tree`]: decomposing trees, comparison bounds, fault tolerance and the
//!   brute-force enumeration oracle.
//! * [`sensitivity`]: divergence, changing-threshold, flip-threshold and
//!   stability experiments.
//! * [`bench`] and [`survey`]: counter sweeps and Monte-Carlo property surveys.
//! * [`matrix_file`]: the comma-separated matrix format.
//!
//! Real-valued code is generic over [`Scalar`] (`f32`, `f64`); the `*64`
//! aliases below fix it to `f64`.

pub mod bench;
pub mod decision;
pub mod error;
pub mod matrix_file;
pub mod pairwise;
pub mod random;
pub mod ranking;
pub mod scalar;
pub mod sensitivity;
pub mod survey;
pub mod tree;
pub mod tree_ranker;

pub use decision::{
    global_weights, madm_rank, madm_utilities, normalize, variances, weights, AttributeSpec, DecisionMatrix,
    Direction, NormalizedMatrix, Scheme, VarianceReport, WeightVector,
};
pub use error::{Error, Result};
pub use pairwise::{
    find_cycle, pair_utilities, pair_weights, pmadm_rank, variance_matrix, PairwiseOutcome,
    PairwiseRun, Verdict, VarianceMatrix,
};
pub use ranking::{Algorithm, Ranking, Scores};
pub use scalar::Scalar;
pub use tree::DecomposingTree;
pub use tree_ranker::{lpmadm_rank, PivotStrategy};

pub type DecisionMatrix64 = DecisionMatrix<f64>;
pub type NormalizedMatrix64 = NormalizedMatrix<f64>;
pub type WeightVector64 = WeightVector<f64>;
pub type Ranking64 = Ranking<f64>;
pub type PairwiseOutcome64 = PairwiseOutcome<f64>;
pub type PairwiseRun64 = PairwiseRun<f64>;
pub type DecisionMatrix32 = DecisionMatrix<f32>;
pub type Ranking32 = Ranking<f32>;
