//! Committed witness instances, re-checked on every run.
//!
//! Regenerate with `cargo test -p pmadm-core --test witnesses -- --ignored`.

use std::path::PathBuf;

use pmadm_core::matrix_file::{read_matrix, write_matrix};
use pmadm_core::random::rng;
use pmadm_core::sensitivity::{
    changing_threshold, divergence_witness, flip_thresholds, search_divergence, search_flip_direction,
    search_madm_instability, stability_experiment, Threshold,
};
use pmadm_core::survey::{run_survey, SurveyConfig};
use pmadm_core::{find_cycle, global_weights, pair_weights, DecisionMatrix, Scheme};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(name: &str) -> DecisionMatrix<f64> {
    read_matrix(fixture(name)).unwrap()
}

const SEARCH_SEED: u64 = 2024;
const SEARCH_TRIALS: usize = 100_000;

#[test]
#[ignore]
fn regenerate() {
    let w = search_divergence(&mut rng(SEARCH_SEED), SEARCH_TRIALS).expect("divergence witness");
    write_matrix(fixture("divergence_5x4.csv"), &w.matrix).unwrap();

    let (w, row) = search_madm_instability(&mut rng(SEARCH_SEED), SEARCH_TRIALS).expect("instability witness");
    write_matrix(fixture("madm_unstable_5x4.csv"), &w.matrix).unwrap();
    let perturbed = w.matrix.with_row(4, &row).unwrap();
    write_matrix(fixture("madm_unstable_5x4_after.csv"), &perturbed).unwrap();

    for (heavier, name) in [(true, "flip_pair_heavier_5x4.csv"), (false, "flip_pair_lighter_5x4.csv")] {
        let w = search_flip_direction(&mut rng(SEARCH_SEED), heavier, SEARCH_TRIALS).expect("flip witness");
        write_matrix(fixture(name), &w.matrix).unwrap();
    }

    let dir = tempfile::tempdir().unwrap();
    let mut config = SurveyConfig::new(10_000, 5, 4, SEARCH_SEED);
    config.fixture_dir = Some(dir.path().to_path_buf());
    config.max_fixtures = 1;
    let summary = run_survey(&config).unwrap();
    std::fs::copy(&summary.counterexample_fixtures[0], fixture("cycle_5x4.csv")).unwrap();
}

#[test]
fn divergence_fixture() {
    let m = load("divergence_5x4.csv");
    assert_eq!(divergence_witness(&m, Scheme::Max).unwrap(), Some((0, 1)));
    let norm = pmadm_core::normalize(&m, Scheme::Max).unwrap();
    let pw = pair_weights(norm.row(0), norm.row(1)).unwrap();
    assert!(pw.0[0] < global_weights(&norm).0[0]);

    let r = changing_threshold(&m, Scheme::Max, (0, 1)).unwrap();
    assert!(r.threshold_satisfied);
    let d = r.deltas.unwrap();
    assert!(d.delta_ij.abs() > (d.global_i - d.global_j).abs());
    assert!(d.magnitude_condition);
}

#[test]
fn madm_instability_fixture() {
    let before = load("madm_unstable_5x4.csv");
    let after = load("madm_unstable_5x4_after.csv");
    let r = stability_experiment(&before, Scheme::Max, "N5", after.row(4)).unwrap();
    let s = r.stability.unwrap();
    assert!(!s.madm_stable, "{:?} -> {:?}", s.madm_order_before, s.madm_order_after);
    assert!(s.pmadm_stable);
    assert!(!s.clamped);
}

fn check_flip(name: &str, heavier: bool) {
    let m = load(name);
    let r = flip_thresholds(&m, Scheme::Max, (0, 1), 0).unwrap();
    let f = r.flip.unwrap();
    assert_eq!(f.pair_weight > f.global_weight, heavier);
    let (Threshold::Finite(madm), Threshold::Finite(pmadm)) = (f.madm_root, f.pmadm_root) else {
        panic!("thresholds must be finite: {f:?}");
    };
    assert_eq!(pmadm.abs() < madm.abs(), heavier, "{f:?}");
}

#[test]
fn flip_direction_fixtures() {
    check_flip("flip_pair_heavier_5x4.csv", true);
    check_flip("flip_pair_lighter_5x4.csv", false);
}

#[test]
fn cycle_fixture() {
    let m = load("cycle_5x4.csv");
    let (x, y, z) = find_cycle(&m, Scheme::Max).unwrap().expect("committed instance is intransitive");
    assert!(x != y && y != z && x != z);
}
