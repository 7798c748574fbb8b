use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    root.join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusionkit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_s4() {
    let out = run(&["classify", "--group", &data("groups/s4.json"), "--p", "2", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "fusion-v1");
    let cr = v["classes"].as_array().unwrap().iter().filter(|r| r["centric"] == true && r["radical"] == true).count();
    assert_eq!(cr, 2);
}

#[test]
fn classify_trivial() {
    let out = run(&["classify", "--group", &data("groups/trivial.json"), "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert!(v["generated_unix"].is_u64());
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"permutations\": [").unwrap();
    let out = run(&["classify", "--group", bad.to_str().unwrap(), "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("group JSON"));
    let out = run(&["classify", "--group", &data("groups/s4.json"), "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", "--group", "/nonexistent.json", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("{i}.json"))).collect();
    for (i, path) in paths.iter().enumerate() {
        let threads = if i == 0 { "1" } else { "4" };
        let out = run(&[
            "classify",
            "--group",
            &data("groups/s4.json"),
            "--p",
            "2",
            "--threads",
            threads,
            "--no-timestamp",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("class"));
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn linking_dump() {
    let out = run(&["linking", "--group", &data("groups/d8.json"), "--p", "2", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "linking-v1");
    assert_eq!(v["valid"], true);
}

#[test]
fn verify_s4() {
    let out = run(&["verify", "--group", &data("groups/s4.json"), "--p", "2", "--dmax", "3", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "theorem-v1");
    assert_eq!(v["valid"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    assert_eq!(v["steps"][0]["certificate"]["schema"], "cert-v1");
}

#[test]
fn verify_a5() {
    let out = run(&["verify", "--group", &data("groups/a5.json"), "--p", "2", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn collection_missing_a_radical_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    // the Sylow subgroup alone, without the normal Klein four
    let classes = json(&run(&["classify", "--group", &data("groups/s4.json"), "--p", "2"]));
    let sylow = classes["sylow"].clone();
    std::fs::write(&h, serde_json::json!({ "subgroups": [sylow] }).to_string()).unwrap();
    let out = run(&[
        "verify",
        "--group",
        &data("groups/s4.json"),
        "--p",
        "2",
        "--dmax",
        "1",
        "--collection",
        h.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("misses centric-radical"));
}

#[test]
fn homology_of_l_and_pruned_agree() {
    let out = run(&["homology", "--group", &data("groups/s4.json"), "--p", "2", "--dmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["nerves"][0]["homology"], v["nerves"][1]["homology"]);
}

#[test]
fn homology_of_a_point_and_degree_zero() {
    let v = json(&run(&["homology", "--group", &data("groups/trivial.json"), "--p", "2", "--dmax", "3"]));
    let h = v["nerves"][0]["homology"].as_array().unwrap();
    assert_eq!(h.len(), 4);
    assert_eq!(h[0]["rank"], 1);
    assert!(h[1..].iter().all(|g| g["rank"] == 0 && g["torsion"].as_array().unwrap().is_empty()));
    let v = json(&run(&["homology", "--group", &data("groups/d8.json"), "--p", "2", "--dmax", "0"]));
    assert_eq!(v["nerves"][0]["homology"].as_array().unwrap().len(), 1);
    assert_eq!(v["nerves"][0]["homology"][0]["rank"], 1);
}

#[test]
fn nerve_cap_exits_3() {
    let out = run(&["homology", "--group", &data("groups/s4.json"), "--p", "2", "--dmax", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tower_classification_reports_the_oracle() {
    let out = run(&["classify", "--tower", &data("towers/dihedral.json"), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["tower"]["identity_oracle"]["checks"].as_array().unwrap();
    for c in checks {
        assert_eq!(c["passed"] == true, c["property"] != "finitely many image classes", "{c}");
    }
}
