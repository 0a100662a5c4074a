use proptest::prelude::*;

use pmadm_core::pairwise::{pmadm_rank_normalized, Comparator, OutcomeTable};
use pmadm_core::tree::{
    comparison_bounds, enumerate_decompositions, fault_tolerance_records, final_layer_sum, floor_log2, optimal_split,
    optimal_tree, probability_optimal, tree_fault_tolerance, DecomposingTree,
};
use pmadm_core::tree_ranker::{lpmadm_rank_normalized, lpmadm_trace};
use pmadm_core::{normalize, DecisionMatrix, PivotStrategy, Scheme};

fn strategies(seed: u64) -> [PivotStrategy; 4] {
    [
        PivotStrategy::Random(seed),
        PivotStrategy::MadmPresequence,
        PivotStrategy::AvgOrderPresequence,
        PivotStrategy::OracleMedian,
    ]
}

fn rows(min_m: usize, max_m: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (min_m..=max_m, 1..=max_n)
        .prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), m))
}

/// Tree whose left child size at each split is drawn from `picks`.
fn arbitrary_tree(m: usize, picks: &[usize]) -> DecomposingTree {
    let mut k = 0;
    DecomposingTree::from_splitter(m, |v| {
        let a = picks[k % picks.len()] % v;
        k += 1;
        (a, v - 1 - a)
    })
    .unwrap()
}

proptest! {
    #[test]
    fn arbitrary_trees_obey_the_decomposition_rule(m in 1usize..60, picks in prop::collection::vec(0usize..1000, 1..40)) {
        let t = arbitrary_tree(m, &picks);
        t.validate().unwrap();
        for (id, n) in t.nodes().iter().enumerate() {
            prop_assert_eq!(t.is_terminal(id), n.value <= 1);
        }
        let split_cost: u64 = t.nodes().iter().filter(|n| n.children.is_some()).map(|n| n.value as u64 - 1).sum();
        prop_assert_eq!(t.comparison_cost(), split_cost);
        if m >= 2 {
            let (lo, hi) = comparison_bounds(m).unwrap();
            prop_assert!(lo <= t.comparison_cost() && t.comparison_cost() <= hi);
        }
    }

    #[test]
    fn lpmadm_matches_round_robin_without_cycles(rows in rows(1, 12, 6), seed in any::<u64>()) {
        let norm = normalize(&DecisionMatrix::from_rows(rows).unwrap(), Scheme::Max).unwrap();
        let table = OutcomeTable::compute(&Comparator::new(&norm));
        prop_assume!(norm.m() < 3 || table.find_cycle().is_none());
        let want = pmadm_rank_normalized(&norm).order;
        for s in strategies(seed) {
            let (r, tree) = lpmadm_rank_normalized(&norm, s);
            prop_assert_eq!(&r.order, &want, "{}", s);
            prop_assert_eq!(r.comparison_count, tree.comparison_cost());
            tree.validate().unwrap();
        }
    }

    #[test]
    fn comparison_count_within_bounds(rows in rows(2, 128, 2), seed in any::<u64>()) {
        let norm = normalize(&DecisionMatrix::from_rows(rows).unwrap(), Scheme::Max).unwrap();
        let m = norm.m() as u64;
        for s in strategies(seed) {
            let (r, _) = lpmadm_rank_normalized(&norm, s);
            prop_assert!(r.comparison_count <= m * (m - 1) / 2);
        }
    }

    #[test]
    fn oracle_median_hits_the_lower_bound(col in prop::collection::vec(0.01f64..1.0, 2..128)) {
        // a single attribute is always transitive
        let norm = normalize(&DecisionMatrix::from_columns(vec![col]).unwrap(), Scheme::Max).unwrap();
        let (r, _) = lpmadm_rank_normalized(&norm, PivotStrategy::OracleMedian);
        prop_assert_eq!(r.comparison_count, comparison_bounds(norm.m()).unwrap().0);
    }

    #[test]
    fn partitions_are_sound(rows in rows(2, 10, 4), seed in any::<u64>()) {
        let norm = normalize(&DecisionMatrix::from_rows(rows).unwrap(), Scheme::Max).unwrap();
        let table = OutcomeTable::compute(&Comparator::new(&norm));
        let transitive = norm.m() < 3 || table.find_cycle().is_none();
        for s in strategies(seed) {
            let (_, _, steps) = lpmadm_trace(&norm, s);
            for step in &steps {
                for &l in &step.losers {
                    prop_assert!(!table.beats(l, step.pivot));
                    if transitive {
                        for &w in &step.winners {
                            prop_assert!(!table.beats(l, w));
                        }
                    }
                }
                for &w in &step.winners {
                    prop_assert!(!table.beats(step.pivot, w));
                }
            }
        }
    }

    #[test]
    fn seeded_runs_are_reproducible(rows in rows(1, 20, 4), seed in any::<u64>()) {
        let norm = normalize(&DecisionMatrix::from_rows(rows).unwrap(), Scheme::Max).unwrap();
        for s in strategies(seed) {
            prop_assert_eq!(lpmadm_rank_normalized(&norm, s), lpmadm_rank_normalized(&norm, s));
        }
    }
}

#[test]
fn oracle_median_is_the_brute_force_minimum_up_to_20() {
    for m in 2..=20 {
        let col: Vec<f64> = (1..=m).map(|v| v as f64).collect();
        let norm = normalize(&DecisionMatrix::from_columns(vec![col]).unwrap(), Scheme::Max).unwrap();
        let (r, _) = lpmadm_rank_normalized(&norm, PivotStrategy::OracleMedian);
        assert_eq!(r.comparison_count, enumerate_decompositions(m, 20).unwrap().min_comparisons, "m={m}");
    }
}

#[test]
fn layer_and_final_layer_laws_up_to_4096() {
    for m in 2..=4096usize {
        let t = optimal_tree(m);
        assert_eq!(t.layer_count(), floor_log2(m) as usize, "m={m}");
        assert_eq!(t.deepest_layer_sum(), final_layer_sum(m).unwrap(), "m={m}");
        assert_eq!(t.comparison_cost(), comparison_bounds(m).unwrap().0, "m={m}");
    }
}

#[test]
fn tolerance_formula_discrepancies_are_recorded() {
    let records = fault_tolerance_records(2..=16).unwrap();
    assert!(!records.is_empty());
    for r in &records {
        assert!(r.unordered_count >= 1 && r.ordered_count >= r.unordered_count);
        assert!(r.formula >= 1);
    }
    let mismatched: Vec<usize> = records.iter().filter(|r| !r.agrees()).map(|r| r.m).collect();
    // odd m agree; even m count the mirror of the balanced split
    assert!(mismatched.iter().all(|m| m % 2 == 0), "{mismatched:?}");
}

#[test]
fn peak_probability_of_optimal_falls_across_ranges() {
    let peaks: Vec<f64> = (2..=9u32)
        .map(|k| {
            ((1usize << k)..(1usize << (k + 1)))
                .map(|m| probability_optimal(m, optimal_split(m)).unwrap().value())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn whole_tree_product_vs_enumerated_optimal_trees() {
    // the per-layer product counts each split's tolerance independently
    let product = tree_fault_tolerance(&optimal_tree(7));
    let enumerated = enumerate_decompositions(7, 20).unwrap().optimal_decompositions;
    assert_eq!((product, enumerated), (2, 1));
}
