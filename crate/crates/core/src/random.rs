//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::DecisionMatrix;
use crate::scalar::Scalar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `[0, 1)` rows, drawn as `f64` and converted.
pub fn random_rows<T: Scalar, R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<Vec<T>> {
    (0..m)
        .map(|_| (0..n).map(|_| T::lit(rng.gen::<f64>())).collect())
        .collect()
}

/// An `m x n` benefit matrix with entries uniform in `(0, 1)`. Exact zeros
/// are nudged up so that any column is valid under either scheme.
pub fn random_matrix<T: Scalar, R: Rng>(rng: &mut R, m: usize, n: usize) -> DecisionMatrix<T> {
    let rows = random_rows::<T, R>(rng, m, n)
        .into_iter()
        .map(|r| r.into_iter().map(|v| if v > T::zero() { v } else { T::epsilon() }).collect())
        .collect();
    DecisionMatrix::from_rows(rows).expect("random rows are rectangular and finite")
}
