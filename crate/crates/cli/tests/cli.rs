use std::path::PathBuf;
use std::process::{Command, Output};

use pmadm_cli::report::{RankReport, ReportFile, TreeReport};
use pmadm_core::survey::SurveySummary;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn pmadm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmadm")).args(args).output().unwrap()
}

fn stdout_ok(args: &[&str]) -> String {
    let out = pmadm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rank(file: &str, extra: &[&str]) -> RankReport {
    let path = fixture(file);
    let mut args = vec!["rank", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    match ReportFile::from_json(&stdout_ok(&args)).unwrap() {
        ReportFile::Rank(r) => r,
        other => panic!("{other:?}"),
    }
}

fn tree(m: usize) -> TreeReport {
    match ReportFile::from_json(&stdout_ok(&["analyze-tree", "--m", &m.to_string()])).unwrap() {
        ReportFile::AnalyzeTree(t) => t,
        other => panic!("{other:?}"),
    }
}

fn verify(args: &[&str]) -> SurveySummary {
    let mut all = vec!["verify"];
    all.extend_from_slice(args);
    match ReportFile::from_json(&stdout_ok(&all)).unwrap() {
        ReportFile::Verify(s) => s,
        other => panic!("{other:?}"),
    }
}

fn bench_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn pmadm_orders_the_single_attribute_example() {
    let r = rank("table1_p1.csv", &["--algorithm", "pmadm"]);
    assert_eq!(r.ordered_ids, ["N5", "N4", "N3", "N2", "N1"]);
    assert_eq!(r.comparison_count, 10);
    assert_eq!(r.utility_evaluation_count, 20);
    assert_eq!(r.score_kind, "wins");
    assert!(!r.cycle_detected);
    assert!(r.tree.is_none());
}

#[test]
fn madm_orders_three_nodes() {
    let r = rank("three_nodes.csv", &["--algorithm", "madm"]);
    assert_eq!(r.ordered_ids, ["N3", "N2", "N1"]);
    assert_eq!(r.comparison_count, 0);
    assert_eq!(r.utility_evaluation_count, 3);
    assert_eq!(r.score_kind, "utility");
}

#[test]
fn lpmadm_reports_its_tree() {
    for pivot in ["madm", "avg-order", "oracle-median", "random:7"] {
        let r = rank("table1_p1.csv", &["--algorithm", "lpmadm", "--pivot", pivot]);
        assert_eq!(r.ordered_ids, ["N5", "N4", "N3", "N2", "N1"], "{pivot}");
        assert_eq!(r.pivot.as_deref(), Some(pivot));
        let layers = r.tree.unwrap();
        assert_eq!(layers[0], [5]);
        let cost: u64 = layers.iter().flatten().filter(|&&v| v > 1).map(|&v| v as u64 - 1).sum();
        assert_eq!(cost, r.comparison_count);
    }
    let best = rank("table1_p1.csv", &["--algorithm", "lpmadm", "--pivot", "oracle-median"]);
    assert_eq!(best.comparison_count, 6);
}

#[test]
fn single_node_needs_no_comparisons() {
    for alg in ["madm", "pmadm", "lpmadm"] {
        let r = rank("single_node.csv", &["--algorithm", alg]);
        assert_eq!(r.ordered_ids, ["solo"]);
        assert_eq!(r.comparison_count, 0);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = fixture("cycle_5x4.csv");
    for alg in ["madm", "pmadm", "lpmadm"] {
        let args = ["rank", path.to_str().unwrap(), "--algorithm", alg, "--pivot", "random:3"];
        assert_eq!(stdout_ok(&args), stdout_ok(&args));
    }
}

#[test]
fn output_flag_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let path = fixture("table1_p1.csv");
    let printed = stdout_ok(&["rank", path.to_str().unwrap()]);
    assert!(stdout_ok(&["rank", path.to_str().unwrap(), "--output", out.to_str().unwrap()]).is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), printed);
}

#[test]
fn cycle_instance_is_flagged() {
    let r = rank("cycle_5x4.csv", &["--algorithm", "pmadm"]);
    assert!(r.cycle_detected);
}

#[test]
fn malformed_input_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,a,b\nN1,0.1,0.2\nN2,0.3,oops\n").unwrap();
    let out = pmadm(&["rank", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3, column 3"), "{err}");
    assert_eq!(err.lines().count(), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_and_unknown_flags_exit_two() {
    assert_eq!(pmadm(&["rank", "/nonexistent/m.csv"]).status.code(), Some(2));
    let path = fixture("table1_p1.csv");
    assert_eq!(pmadm(&["rank", path.to_str().unwrap(), "--bogus"]).status.code(), Some(2));
    assert_eq!(pmadm(&["rank", path.to_str().unwrap(), "--pivot", "median"]).status.code(), Some(2));
    assert_eq!(pmadm(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn analyze_tree_reports() {
    let t = tree(8);
    assert_eq!((t.lower_bound, t.upper_bound), (13, 28));
    assert_eq!(t.layers, 3);
    assert_eq!(t.comparisons, t.lower_bound);
    assert_eq!(t.tree[0], [8]);

    let t = tree(2);
    assert_eq!((t.lower_bound, t.upper_bound), (1, 1));
    assert_eq!(t.layers, 1);

    let t = tree(17);
    assert_eq!(t.final_layer_sum, 2);
    assert_eq!(t.layers, 4);

    let t = tree(100);
    assert!(t.fault_tolerance >= 1);
    assert!(t.probability_optimal.favorable <= t.probability_optimal.total);
    assert_eq!(t.tree.iter().map(Vec::len).sum::<usize>(), t.divisions * 2 + 1);
}

#[test]
fn analyze_tree_rejects_tiny_m() {
    let out = pmadm(&["analyze-tree", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("pmadm:"));
}

#[test]
fn bench_counts_match_closed_forms() {
    let text = stdout_ok(&["bench", "--m-min", "100", "--m-max", "100", "--no-timing"]);
    assert!(text.lines().any(|l| l == "m,algorithm,comparisons,utility_evaluations,wall_time_ns"));
    let rows = bench_rows(&text);
    let find = |alg: &str| rows.iter().find(|r| r[1] == alg).unwrap().clone();
    assert_eq!(find("pmadm")[2], "4950");
    assert_eq!(find("pmadm")[3], "9900");
    assert_eq!(find("madm")[2], "0");
    assert_eq!(find("madm")[3], "100");
    let lp: u64 = find("lpmadm:madm")[2].parse().unwrap();
    assert!((480..4950).contains(&lp), "{lp}");
}

#[test]
fn bench_sweep_shape_and_determinism() {
    let args = [
        "bench", "--m-min", "100", "--m-max", "300", "--step", "50", "--algorithms", "pmadm,lpmadm:oracle-median", "--no-timing",
    ];
    let text = stdout_ok(&args);
    assert_eq!(text, stdout_ok(&args));
    let rows = bench_rows(&text);
    assert_eq!(rows.len(), 10);
    let ms: Vec<&str> = rows.iter().step_by(2).map(|r| r[0].as_str()).collect();
    assert_eq!(ms, ["100", "150", "200", "250", "300"]);
    assert!(rows.iter().all(|r| r[4] == "0"));
}

#[test]
fn verify_trivial_and_stability() {
    let s = verify(&["--trials", "1", "--m", "2"]);
    assert_eq!(s.transitivity.failed(), 0);
    assert_eq!(s.order_equality.failed(), 0);
    assert_eq!(s.pmadm_stability.failed(), 0);

    let s = verify(&["--trials", "1000", "--m", "10", "--seed", "9"]);
    assert_eq!(s.pmadm_stability.checked, 1000);
    assert_eq!(s.pmadm_stability.passed, 1000);
    assert_eq!(s.order_equality.failed(), 0);
}

#[test]
fn verify_writes_cycle_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let s = verify(&["--trials", "50", "--m", "5", "--fixture-dir", dir.path().to_str().unwrap(), "--max-fixtures", "2"]);
    assert!(s.first_cycle.is_some());
    assert_eq!(s.counterexample_fixtures.len(), 2);
    for f in &s.counterexample_fixtures {
        let r = pmadm(&["rank", f, "--algorithm", "pmadm"]);
        let report = match ReportFile::from_json(&String::from_utf8(r.stdout).unwrap()).unwrap() {
            ReportFile::Rank(r) => r,
            other => panic!("{other:?}"),
        };
        assert!(report.cycle_detected, "{f}");
    }
}
