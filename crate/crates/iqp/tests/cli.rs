//! End-to-end runs of the `iqp` binary.

use std::process::Command;

use serde_json::Value;

fn iqp(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_iqp")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out) = iqp(&all);
    (code, serde_json::from_str(&out).expect("JSON report"))
}

#[test]
fn init_writes_diagram_and_iqp() {
    let dir = std::env::temp_dir().join(format!("iqp-cli-init-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let (code, report) = json(&["init", "--k", "3", "--n", "7", "--variant", "type3", "--out", d]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["vertices"], 13);
    let iqp: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("gr3_7_type3.iqp.json")).unwrap()).unwrap();
    assert_eq!(iqp["quiver"]["n"], 6);
    assert_eq!(iqp["quiver"]["m"], 7);
    let fd: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("gr3_7.facediagram.json")).unwrap()).unwrap();
    assert_eq!(fd["k"], 3);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn init_principal_part_of_gr25_has_no_four_cycles() {
    let dir = std::env::temp_dir().join(format!("iqp-cli-a2-{}", std::process::id()));
    let (code, _) = json(&["init", "--k", "2", "--n", "5", "--variant", "type2", "--out", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    let iqp: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("gr2_5_type2.iqp.json")).unwrap()).unwrap();
    assert_eq!(iqp["quiver"]["n"], 2);
    assert_eq!(iqp["quiver"]["m"], 0);
    assert_eq!(iqp["quiver"]["arrows"].as_array().unwrap().len(), 1);
    assert!(iqp["potential"].as_array().unwrap().iter().all(|t| t[2].as_array().unwrap().len() != 4));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn init_rejects_out_of_range() {
    let (code, _) = iqp(&["init", "--k", "1", "--n", "5"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_compat_passes_and_echoes_config() {
    let (code, report) = json(&["verify-compat", "--k", "2", "--n", "5", "--trials", "100", "--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["trials"], 100);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert!(report["property"].is_string());
}

#[test]
fn verify_compat_is_deterministic() {
    let a = iqp(&["verify-compat", "--k", "3", "--n", "7", "--trials", "20", "--seed", "4", "--json"]);
    let b = iqp(&["verify-compat", "--k", "3", "--n", "7", "--trials", "20", "--seed", "4", "--json"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn jacobian_of_gr25_stabilizes() {
    let (code, report) = json(&["jacobian", "--k", "2", "--n", "5", "--variant", "type3", "--cap", "12"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["killed_degree"], 6);
    let dims: Vec<u64> = report["result"]["dimensions"].as_array().unwrap().iter().map(|d| d[1].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![38; 7]);
}

#[test]
fn jacobian_rejects_small_cap() {
    assert_eq!(iqp(&["jacobian", "--cap", "3"]).0, 2);
}

#[test]
fn rigidity_of_dimer_variant_fails_with_fundamental_witness() {
    let (code, report) = json(&["rigidity", "--k", "3", "--n", "6", "--variant", "bkm"]);
    assert_eq!(code, 1);
    assert_eq!(report["pass"], false);
    let witnesses = report["result"]["witnesses"].as_array().unwrap();
    assert!(witnesses.iter().any(|w| w["fundamental"] == true));
}

#[test]
fn rigidity_of_gr36_passes() {
    let (code, _) = iqp(&["rigidity", "--k", "3", "--n", "6", "--variant", "type3"]);
    assert_eq!(code, 0);
}

#[test]
fn exchange_graph_of_gr26_has_14_seeds() {
    let (code, report) = json(&["exchange-graph", "--k", "2", "--n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["seed_count"], 14);
    assert_eq!(report["result"]["cluster_variables"], 9);
}

#[test]
fn exchange_graph_over_bound_fails() {
    let (code, report) = json(&["exchange-graph", "--k", "3", "--n", "6", "--max-seeds", "10"]);
    assert_eq!(code, 1);
    assert!(report["result"]["seed_count"].is_null());
}

#[test]
fn exchange_graph_csv_output() {
    let path = std::env::temp_dir().join(format!("iqp-cli-eg-{}.csv", std::process::id()));
    let (code, _) = iqp(&["exchange-graph", "--k", "2", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("2,5,10000,5,5,"));
    std::fs::remove_file(path).ok();
}

#[test]
fn human_table_names_version_and_verdict() {
    let (code, out) = iqp(&["exchange-graph", "--k", "2", "--n", "5"]);
    assert_eq!(code, 0);
    assert!(out.starts_with(&format!("iqp {}", env!("CARGO_PKG_VERSION"))));
    assert!(out.trim_end().ends_with("PASS"));
}
