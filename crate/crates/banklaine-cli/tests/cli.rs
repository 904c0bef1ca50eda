//! End-to-end checks of the command line interface: exit codes, output
//! determinism, and the operation coverage contract.

use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_banklaine"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("banklaine-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn eval_fm_emits_value_and_err() {
    let (code, stdout, _) = run(&["eval", "--family", "Fm", "--m", "2", "--z", "1+0i"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).expect("json output");
    let value = v["value"]["re"].as_f64().expect("re");
    assert!(v["value"]["im"].as_f64().expect("im").abs() < 1e-12);
    assert!((value - 4.31739299152).abs() < 1e-9);
    assert!(v["err"].as_f64().expect("err") <= 1e-9);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let args = [
        "indicator", "--rho", "1", "--rmax", "30", "--thetas", "9", "--rungs", "6",
    ];
    let (c1, json1, _) = run(&args);
    let (c2, json2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(json1, json2);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let (c3, csv1, _) = run(&csv_args);
    let (c4, csv2, _) = run(&csv_args);
    assert_eq!(c3, 0);
    assert_eq!(c4, 0);
    assert_eq!(csv1, csv2);
    assert!(csv1.starts_with("theta,h,rho,c\n"));
}

#[test]
fn out_file_matches_stdout_bytes() {
    let dir = scratch_dir("out");
    let path = dir.join("indicator.json");
    let args = [
        "indicator", "--rho", "1", "--rmax", "30", "--thetas", "9", "--rungs", "6",
    ];
    let (code, stdout, _) = run(&args);
    assert_eq!(code, 0);
    let mut with_out = args.to_vec();
    let path_str = path.to_str().expect("utf8 path");
    with_out.extend(["--out", path_str]);
    let (code, silent, _) = run(&with_out);
    assert_eq!(code, 0);
    assert!(silent.is_empty());
    let written = std::fs::read_to_string(&path).expect("out file");
    assert_eq!(written, stdout);
}

#[test]
fn usage_errors_exit_64() {
    let (code, _, stderr) = run(&["eval", "--family", "Fm", "--m", "2", "--z", "1+0i", "--bogus"]);
    assert_eq!(code, 64);
    assert!(stderr.contains("--bogus") || stderr.contains("unexpected"));

    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 64);

    let (code, _, _) = run(&[]);
    assert_eq!(code, 64);

    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Usage"));
}

#[test]
fn inadmissible_case_reports_constraint() {
    let (code, _, stderr) = run(&["classify", "--case", "iii", "--m", "5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("m is even, m≥4"), "stderr: {stderr}");
}

#[test]
fn tree_round_trip_validate_classify_split() {
    let dir = scratch_dir("tree");
    let t4 = dir.join("t4.json");
    let t4s = t4.to_str().expect("utf8");

    let (code, _, _) = run(&["tree", "builtin", "--m", "4", "--out", t4s]);
    assert_eq!(code, 0);

    let (code, stdout, _) = run(&["tree", "validate", "--in", t4s, "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "valid");

    let (code, stdout, _) = run(&["tree", "classify", "--in", t4s]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).expect("json");
    assert_eq!(v["case"], "iii");
    assert_eq!(v["m"], 4);
    assert_eq!(v["rho"].as_f64().expect("rho"), 3.0);

    let twig = find_twig(t4s);
    let t6 = dir.join("t6.json");
    let t6s = t6.to_str().expect("utf8");
    let (code, _, _) = run(&[
        "tree", "split", "--in", t4s, "--vertex", &twig.to_string(), "--out", t6s,
    ]);
    assert_eq!(code, 0);

    let (code, stdout, _) = run(&["tree", "count", "--in", t6s]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).expect("json");
    assert_eq!(v["m"], 6);

    let (code, stdout, _) = run(&["tree", "validate", "--in", t6s, "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "valid");
}

/// A vertex eligible for splitting: last cross of the top broom handle.
fn find_twig(path: &str) -> i64 {
    let text = std::fs::read_to_string(path).expect("tree file");
    let v: Value = serde_json::from_str(&text).expect("json");
    let vertices = v["vertices"].as_array().expect("vertices");
    let edges = v["edges"].as_array().expect("edges");
    for vertex in vertices {
        let id = vertex["id"].as_i64().expect("id");
        if vertex["real"].as_bool().expect("real") || vertex["label"] != "x" {
            continue;
        }
        let degree = edges
            .iter()
            .filter(|e| {
                let ends = e["ends"].as_array().expect("ends");
                ends[0].as_i64() == Some(id) && ends[1].as_i64() != Some(-1)
                    || ends[1].as_i64() == Some(id)
            })
            .count();
        if degree == 1 && vertex["id"].as_i64().expect("id") > 0 {
            let conj = vertex["conj"].as_i64().expect("conj");
            if conj > id {
                return id;
            }
        }
    }
    panic!("no twig found in {path}");
}

#[test]
fn malformed_tree_json_reports_pointer() {
    let dir = scratch_dir("badtree");
    let t4 = dir.join("t4.json");
    let t4s = t4.to_str().expect("utf8");
    let (code, _, _) = run(&["tree", "builtin", "--m", "4", "--out", t4s]);
    assert_eq!(code, 0);

    let text = std::fs::read_to_string(&t4) .expect("tree file");
    let mut v: Value = serde_json::from_str(&text).expect("json");
    v["vertices"][0]["label"] = Value::String("q".into());
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).expect("serialize")).expect("write");

    let (code, _, stderr) = run(&["tree", "validate", "--in", bad.to_str().expect("utf8")]);
    assert_eq!(code, 2);
    assert!(stderr.contains("/vertices/0/label"), "stderr: {stderr}");
}

#[test]
fn boundary_match_is_tiny_for_a_eq_i() {
    let (code, stdout, _) = run(&[
        "qc", "match", "--a", "i", "--theta", "-1.5707963267948966",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).expect("json");
    assert!(v["max_mismatch"].as_f64().expect("mismatch") < 1e-12);
}

#[test]
fn coverage_lists_every_operation_once() {
    let (code, stdout, _) = run(&["coverage"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).expect("json");
    assert_eq!(v["count"], 41);
    let mut ops: Vec<&str> = v["ops"]
        .as_array()
        .expect("ops")
        .iter()
        .map(|row| row["op"].as_str().expect("op"))
        .collect();
    ops.sort_unstable();
    let mut expected = vec![
        "integrate_along",
        "eval_Fm",
        "eval_Gm",
        "eval_f2",
        "eval_F0",
        "asympt_constant",
        "integrate_equation",
        "product_E",
        "ratio_F",
        "bank_laine_E_from_F",
        "coefficient_from_E",
        "schwarzian",
        "elementary_family",
        "theorem4_family",
        "find_real_zeros",
        "count_zeros_argument_principle",
        "estimate_order",
        "estimate_lambda",
        "estimate_indicator",
        "indicator_of_A_from_E",
        "check_bounded_ratio",
        "c2_lemma_check",
        "koebe_bound_check",
        "asymptotic_values_Fm",
        "classify_orders",
        "validate_tree",
        "check_real_zeros_poles",
        "split_tree",
        "count_singularities",
        "classify",
        "sector_plan",
        "builtin_tree",
        "boundary_stretch_q",
        "extend_Q",
        "strip_interpolation_phi",
        "modified_tangent_T",
        "horizontal_interpolation_tau",
        "beltrami",
        "logarea",
        "strip_tail_bound",
        "boundary_match_check",
    ];
    expected.sort_unstable();
    assert_eq!(ops.len(), ops.iter().collect::<std::collections::BTreeSet<_>>().len());
    assert_eq!(ops, expected);
}

#[test]
fn numerical_failures_exit_1() {
    let (code, _, stderr) = run(&["lambda", "--rmax", "20"]);
    assert_eq!(code, 1, "stderr: {stderr}");
}

#[test]
fn beltrami_grid_csv_has_contracted_header() {
    let (code, stdout, _) = run(&[
        "qc", "beltrami", "--map", "tau", "--shift", "1", "--grid", "0.2:0.8:2,0.2:0.8:2",
        "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("x,y,re_mu,im_mu,K\n"), "stdout: {stdout}");
    assert_eq!(stdout.lines().count(), 5);
}
