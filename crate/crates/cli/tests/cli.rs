//! End-to-end runs of the `bls` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bls")).args(args).output().expect("binary runs")
}

fn with_out<'a>(args: &[&'a str], out: &'a Path) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--out", out.to_str().unwrap()]);
    v
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("error line on stderr");
    serde_json::from_str(line).expect("stderr carries a JSON error")
}

const LATTICE: [&str; 8] = ["--dim", "1", "--sources", "2", "--sublattice-edge", "4", "--depth", "3"];

#[test]
fn fock_sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["--mode", "sample-fock", "--seed", "42", "--samples", "500"];
    args.extend(LATTICE);
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    assert!(bls(&with_out(&args, &a)).status.success());
    assert!(bls(&with_out(&args, &b)).status.success());
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    // the header echoes the output path, so compare the sample lines
    assert_eq!(ta.lines().skip(1).collect::<Vec<_>>(), tb.lines().skip(1).collect::<Vec<_>>());
    let rec: Value = serde_json::from_str(ta.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["sampler"], "distinguishable");
    assert_eq!(rec["counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum::<u64>(), 2);
}

#[test]
fn unsqueezed_exact_sampling_gives_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let mut args = vec!["--mode", "sample-exact", "--squeezing", "0", "--seed", "1"];
    args.extend(LATTICE);
    let o = bls(&with_out(&args, &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let header: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["config"]["M"], 8);
    assert_eq!(header["config"]["n_samples"], 1000);
    let samples: Vec<Value> = text.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(samples.len(), 1000);
    for (i, s) in samples.iter().enumerate() {
        assert_eq!(s["sample_id"], i as u64);
        assert!(s["counts"].as_array().unwrap().iter().all(|c| c == 0));
    }
}

#[test]
fn threshold_detection_writes_clicks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let mut args = vec![
        "--mode",
        "sample-approx",
        "--squeezing",
        "0.8",
        "--seed",
        "3",
        "--samples",
        "50",
        "--detector",
        "threshold",
    ];
    args.extend(LATTICE);
    assert!(bls(&with_out(&args, &out)).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rec: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!(rec.get("counts").is_none());
    assert_eq!(rec["clicks"].as_array().unwrap().len(), 8);
    assert_eq!(rec["sampler"], "approx");
}

#[test]
fn zero_depth_has_no_leakage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("leak.csv");
    let args = [
        "--mode",
        "diagnose-leakage",
        "--dim",
        "1",
        "--sources",
        "3",
        "--sublattice-edge",
        "4",
        "--depth",
        "0",
        "--samples",
        "5",
        "--seed",
        "2",
    ];
    let o = bls(&with_out(&args, &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# config: {"));
    let body = text.lines().skip(1).collect::<Vec<_>>().join("\n");
    let mut rows = csv::Reader::from_reader(body.as_bytes());
    let mut n = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[3].parse::<f64>().unwrap(), 0.0);
        n += 1;
    }
    assert_eq!(n, 15);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("leak.csv.summary.json")).unwrap()).unwrap();
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn bounds_and_walk_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.csv");
    let args = [
        "--mode",
        "diagnose-bounds",
        "--dim",
        "1",
        "--sources",
        "2",
        "--sublattice-edge",
        "3",
        "--depth",
        "3",
        "--squeezing",
        "0.3",
        "--seed",
        "5",
    ];
    assert!(bls(&with_out(&args, &b)).status.success());
    let w = dir.path().join("w.csv");
    let args = [
        "--mode",
        "diagnose-walk",
        "--dim",
        "1",
        "--sources",
        "1",
        "--sublattice-edge",
        "16",
        "--depth",
        "6",
        "--samples",
        "2000",
        "--seed",
        "5",
    ];
    assert!(bls(&with_out(&args, &w)).status.success());
    for p in [&b, &w] {
        let mut s = p.as_os_str().to_owned();
        s.push(".summary.json");
        let summary: Value = serde_json::from_str(&std::fs::read_to_string(s).unwrap()).unwrap();
        let checks = summary["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["pass"] == true), "{checks:?}");
    }
}

#[test]
fn invalid_configuration_exits_2_with_every_problem() {
    let o = bls(&["--mode", "sample-fock", "--squeezing", "0.5", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"]["exit_code"], 2);
    let details: Vec<String> =
        err["error"]["details"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    for needle in ["squeezing incompatible with fock", "--sources", "--seed", "--out"] {
        assert!(details.iter().any(|d| d.contains(needle)), "{needle} missing from {details:?}");
    }
    let o = bls(&["--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "invalid_config");
}

#[test]
fn fock_oracle_cap_leaves_the_distance_blank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    // 8 photons exceed the Fock oracle cap; the bounds themselves are still reported
    let args = [
        "--mode",
        "diagnose-bounds",
        "--source-type",
        "fock",
        "--dim",
        "1",
        "--sources",
        "8",
        "--sublattice-edge",
        "1",
        "--depth",
        "2",
        "--seed",
        "1",
    ];
    let o = bls(&with_out(&args, &out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "fock_true_tvd,"), "{text}");
}

#[test]
fn check_echoes_derived_modes() {
    let mut args = vec!["--mode", "sample-fock", "--seed", "1", "--out", "unused.jsonl", "--check"];
    args.extend(LATTICE);
    let o = bls(&args);
    assert!(o.status.success());
    let cfg: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cfg["M"], 8);
    assert_eq!(cfg["N"], 2);
    assert_eq!(cfg["epsilon"], 1e-6);
    assert!(!Path::new("unused.jsonl").exists());
}

#[test]
fn kernels_selftest_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let o = bls(&["kernels", "selftest", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["report"]["pass"], true);
    assert_eq!(doc["report"]["seed"], 9);
    assert!(String::from_utf8_lossy(&o.stdout).contains("5/5 checks passed"));
}
