use std::path::PathBuf;
use std::process::{Command, Output};

use homalg::hom::{hom, hom_partial};
use homalg::{LabelMap, LabeledGraph, WeightedGraph};
use serde_json::Value;

fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    path.to_str().expect("utf-8 path").to_string()
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (Value, i32, Output) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_homalg"));
    cmd.args(args).env_remove("HOMALG_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    let json = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out.stdout));
    let code = out.status.code().expect("exit code");
    (json, code, out)
}

fn run(args: &[&str]) -> (Value, i32) {
    let (json, code, _) = run_env(args, &[]);
    (json, code)
}

fn weighted(name: &str) -> WeightedGraph {
    WeightedGraph::from_json_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

#[test]
fn hom_of_empty_graph_is_one() {
    let (v, code) = run(&[
        "hom",
        "--graph",
        &data("empty.json"),
        "--target",
        &data("path3.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v, serde_json::json!({ "value": "1" }));
}

#[test]
fn hom_matches_library_with_and_without_pins() {
    let g =
        LabeledGraph::from_json_str(&std::fs::read_to_string(data("edge1.json")).unwrap()).unwrap();
    let h = weighted("path3.json");
    let (v, _) = run(&[
        "hom",
        "--graph",
        &data("edge1.json"),
        "--target",
        &data("path3.json"),
    ]);
    assert_eq!(v["value"], hom(&g, &h).unwrap().to_string());
    for vertex in 1..=3 {
        let pin = format!("1:{vertex}");
        let (v, code) = run(&[
            "hom",
            "--graph",
            &data("edge1.json"),
            "--target",
            &data("path3.json"),
            "--pin",
            &pin,
        ]);
        assert_eq!(code, 0);
        let expected = hom_partial(&g, &h, &LabelMap::new(vec![vertex - 1])).unwrap();
        assert_eq!(v["value"], expected.to_string());
    }
}

#[test]
fn iso_with_identical_files_is_identity() {
    let (v, code) = run(&[
        "iso",
        "--a",
        &data("path3.json"),
        "--b",
        &data("path3.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v,
        serde_json::json!({ "verdict": "iso", "sigma": [1, 2, 3] })
    );
}

#[test]
fn iso_finds_the_permutation_in_every_mode() {
    let h = weighted("path3.json");
    let h2 = weighted("path3_perm.json");
    for mode in ["oracle", "constructive", "both"] {
        let (v, code) = run(&[
            "iso",
            "--a",
            &data("path3.json"),
            "--b",
            &data("path3_perm.json"),
            "--mode",
            mode,
        ]);
        assert_eq!(code, 0, "{mode}");
        let sigma: Vec<usize> = v["sigma"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize - 1)
            .collect();
        assert_eq!(h.permuted(&sigma).unwrap(), h2, "{mode}");
    }
}

#[test]
fn non_isomorphic_exits_one_with_checkable_witness() {
    let (v, code) = run(&[
        "iso",
        "--a",
        &data("path3.json"),
        "--b",
        &data("twins.json"),
        "--mode",
        "oracle",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "noniso");
    let w = LabeledGraph::from_json_str(&v["witness"].to_string()).unwrap();
    assert!(w.is_simple());
    assert_eq!(
        v["lhs"],
        hom(&w, &weighted("path3.json")).unwrap().to_string()
    );
    assert_eq!(
        v["rhs"],
        hom(&w, &weighted("twins.json")).unwrap().to_string()
    );
    assert_ne!(v["lhs"], v["rhs"]);
}

#[test]
fn constructive_mode_rejects_twins() {
    let (v, code) = run(&[
        "iso",
        "--a",
        &data("twins.json"),
        "--b",
        &data("twins.json"),
        "--mode",
        "constructive",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "malformed_input");
}

#[test]
fn contract_then_iso_reports_class_matching() {
    let (v, code) = run(&["contract", "--target", &data("twins.json")]);
    assert_eq!(code, 0);
    let c = WeightedGraph::from_json_str(&v.to_string()).unwrap();
    assert_eq!(c.order(), 2);
    let (v, code) = run(&[
        "iso",
        "--a",
        &data("twins.json"),
        "--b",
        &data("twins.json"),
        "--contract",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["classes_a"], serde_json::json!([[1], [2, 3]]));
    assert_eq!(v["class_matching"], serde_json::json!([[1, 1], [2, 2]]));
}

#[test]
fn pinned_iso_respects_pins() {
    let (v, code) = run(&[
        "iso",
        "--a",
        &data("path3.json"),
        "--b",
        &data("path3.json"),
        "--pin-a",
        "1:1",
        "--pin-b",
        "1:3",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["witness"]["k"], 1);
}

#[test]
fn witness_search_and_bound() {
    let (v, code) = run(&[
        "witness",
        "--a",
        &data("path3.json"),
        "--b",
        &data("path3.json"),
        "--pin-a",
        "1:1",
        "--pin-b",
        "1:3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["found"], true);
    assert_ne!(v["witness"]["lhs"], v["witness"]["rhs"]);
    let (v, code) = run(&[
        "witness",
        "--a",
        &data("path3.json"),
        "--b",
        &data("path3.json"),
        "--pins",
        "1:2",
        "--max-vertices",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["found"], false);
    assert_eq!(v["max_vertices"], 3);
}

#[test]
fn orbits_and_rank_agree() {
    let (o, code) = run(&["orbits", "--target", &data("path3.json"), "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(o["orbit_count"], 9);
    let (r, code) = run(&[
        "rank",
        "--target",
        &data("path3.json"),
        "--k",
        "2",
        "--column-space",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["rank"]["rank_n"], 9);
    assert_eq!(r["rank"]["holds"], true);
    assert_eq!(r["column_space"]["holds"], true);
}

#[test]
fn counterexample_reports_violation() {
    let (v, code) = run(&[
        "counterexample",
        "--p",
        "2",
        "--n",
        "2",
        "--ells",
        "2,1",
        "--k",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["violation"], true);
    assert_eq!(v["hom_equal_on_all"], true);
    assert_eq!(v["isomorphism_exists"], false);
    assert_eq!(v["control"]["separated"], true);
    let (v, code) = run(&["counterexample", "--p", "4", "--n", "2", "--ells", "2,1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "malformed_input");
}

#[test]
fn selftest_passes() {
    let (v, code) = run(&["selftest", "--seed", "11"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
}

#[test]
fn malformed_input_exits_two() {
    for args in [
        vec![
            "hom",
            "--graph",
            "/nonexistent.json",
            "--target",
            "/nonexistent.json",
        ],
        vec!["iso", "--a", "x.json"],
        vec!["iso", "--a", "a", "--b", "b", "--mode", "sideways"],
        vec!["nonsense"],
    ] {
        let (v, code) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(v["error"], "malformed_input");
    }
    let (_, code) = run(&[
        "hom",
        "--graph",
        &data("path3.json"),
        "--target",
        &data("path3.json"),
    ]);
    assert_eq!(code, 2);
    let (_, code) = run(&[
        "hom",
        "--graph",
        &data("edge1.json"),
        "--target",
        &data("path3.json"),
        "--pin",
        "1:7",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn budget_exhaustion_exits_three() {
    let args = [
        "hom",
        "--graph",
        &data("edge1.json"),
        "--target",
        &data("path3.json"),
    ];
    let (v, code, _) = run_env(&args, &[("HOMALG_BUDGET", "1")]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "budget_exhausted");
    let mut flagged = args.to_vec();
    flagged.extend(["--hom-budget", "1000"]);
    let (_, code, _) = run_env(&flagged, &[("HOMALG_BUDGET", "1")]);
    assert_eq!(code, 0, "the flag overrides the environment");
}

#[test]
fn output_is_deterministic_and_independent_of_parallelism() {
    let args = ["rank", "--target", &data("path3.json"), "--k", "2"];
    let (_, _, first) = run_env(&args, &[]);
    let (_, _, second) = run_env(&args, &[]);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let (_, _, sequential) = run_env(&seq, &[]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, sequential.stdout);
}

#[test]
fn pretty_adds_summary_on_stderr() {
    let (v, code, out) = run_env(
        &[
            "orbits",
            "--target",
            &data("path3.json"),
            "--k",
            "1",
            "--pretty",
        ],
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(v["orbit_count"], 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\n  "));
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "3 orbits");
}
