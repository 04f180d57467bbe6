use std::process::{Command, Output};

use serde_json::Value;

fn srk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srk"))
        .args(args)
        .output()
        .expect("srk runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn value_of<'a>(recs: &'a [Value], stat: &str) -> &'a str {
    recs.iter()
        .find(|r| r["statistic"] == stat)
        .unwrap_or_else(|| panic!("no {stat} record"))["value"]
        .as_str()
        .unwrap()
}

#[test]
fn volume_example() {
    let o = srk(&["volume", "--q", "2", "--m", "2", "--eta", "2", "--ell", "1", "--r", "1", "--format", "json"]);
    assert!(o.status.success());
    let recs = json_records(&o);
    assert_eq!(value_of(&recs, "sphere"), "9");
    assert_eq!(value_of(&recs, "ball"), "10");
    assert_eq!(value_of(&recs, "sphere_in_bounds"), "true");
}

#[test]
fn explicit_modulus_matches_builtin() {
    let a = srk(&["volume", "--q", "9", "--m", "2", "--eta", "2", "--ell", "2", "--format", "json"]);
    let b = srk(&[
        "volume", "--p", "3", "--e", "2", "--modulus", "2,2,1", "--m", "2", "--eta", "2", "--ell", "2", "--format",
        "json",
    ]);
    let vals = |o: &Output| -> Vec<String> {
        json_records(o).iter().map(|r| r["value"].as_str().unwrap().to_string()).collect()
    };
    assert_eq!(vals(&a), vals(&b));
    let bad = srk(&["volume", "--p", "3", "--e", "2", "--modulus", "2,0,1", "--m", "1", "--eta", "1", "--ell", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn capacity_example() {
    let o = srk(&["capacity", "--b", "1", "--rho", "0.5", "--format", "json"]);
    let recs = json_records(&o);
    assert_eq!(value_of(&recs, "capacity"), "0.25");
    let cap = recs.iter().find(|r| r["statistic"] == "capacity").unwrap();
    assert_eq!(cap["exact"], "1/4");
}

#[test]
fn capacity_grid_lies_below_one_minus_rho() {
    let o = srk(&["capacity", "--b", "1/2", "--steps", "10", "--format", "json"]);
    let recs = json_records(&o);
    for t in 0..9u64 {
        let get = |s: &str| -> f64 {
            recs.iter()
                .find(|r| r["statistic"] == s && r["trial"] == t)
                .unwrap()["value"]
                .as_str()
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!(get("capacity") <= get("one_minus_rho"));
    }
}

#[test]
fn verify_sweeps_exit_codes() {
    let o = srk(&["verify", "lemma2", "--q", "2", "--eta-max", "6", "--ell-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    for sweep in ["volume-bounds", "gaussian-bounds", "decomposable-count"] {
        let o = srk(&["verify", sweep, "--q", "3", "--eta-max", "3", "--ell-max", "3"]);
        assert_eq!(o.status.code(), Some(0), "{sweep}: {}", stdout(&o));
    }
    // the decomposable lower bound fails at q = 5, eta = 1, ell = 2, w = 1
    let o = srk(&["verify", "lemma3", "--q", "5", "--eta-max", "1", "--ell-max", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(value_of(&json_records(&o), "passed"), "false");
}

#[test]
fn guard_and_range_errors_exit_nonzero() {
    let o = srk(&["volume", "--q", "2", "--m", "2", "--eta", "2", "--ell", "1", "--r", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = srk(&["experiment", "list-size", "--q", "2", "--m", "4", "--eta", "4", "--ell", "2", "--rho", "0.25", "--epsilon", "0.125", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("guard"));
}

#[test]
fn help_lists_required_fields() {
    let o = srk(&["volume", "--help"]);
    let text = stdout(&o);
    for flag in ["--m", "--eta", "--ell", "--q", "--seed", "--format", "--out"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn json_lines_round_trip() {
    let o = srk(&["volume", "--q", "3", "--m", "1", "--eta", "2", "--ell", "2", "--format", "json"]);
    let text = stdout(&o);
    let recs = json_records(&o);
    assert_eq!(text.lines().count(), recs.len());
    let again: String = recs.iter().map(|r| format!("{}\n", serde_json::to_string(r).unwrap())).collect();
    assert_eq!(again, text);
}

#[test]
fn csv_has_fixed_header() {
    let o = srk(&["capacity", "--b", "1", "--rho", "1/3"]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "verb,statistic,trial,value,exact,ci_low,ci_high,seed,trials,config"
    );
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.records().count(), 5);
}

#[test]
fn output_directory_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "experiment", "correlation", "--q", "2", "--m", "1", "--eta", "1", "--ell", "4", "--rho", "0.5", "--trials",
        "3000", "--seed", "99", "--out", "runs/corr.csv",
    ];
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_srk"))
            .args(args)
            .env("SRK_OUTPUT_DIR", dir.path())
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(dir.path().join("runs/corr.csv")).unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains(",99,3000,"));
}

#[test]
fn timing_is_opt_in() {
    let o = srk(&["capacity", "--b", "1", "--rho", "0.5", "--format", "json", "--timing"]);
    assert!(json_records(&o).iter().any(|r| r["statistic"] == "runtime_ms"));
    let o = srk(&["capacity", "--b", "1", "--rho", "0.5", "--format", "json"]);
    assert!(!json_records(&o).iter().any(|r| r["statistic"] == "runtime_ms"));
}

#[test]
fn every_sample_kind_runs() {
    let space = ["--q", "2", "--m", "2", "--eta", "2", "--ell", "2"];
    let cases: Vec<Vec<&str>> = vec![
        [&["sample", "ball"][..], &space, &["--r", "2"]].concat(),
        [&["sample", "d2"][..], &space, &["--w", "2"]].concat(),
        vec!["sample", "rank-matrix", "--q", "3", "--m", "2", "--eta", "3", "--r", "2"],
        vec!["sample", "subspace", "--q", "4", "--eta", "4", "--k", "2"],
        vec!["sample", "decomposable", "--q", "2", "--eta", "3", "--ell", "2", "--w", "3"],
        [&["sample", "linear-code"][..], &space, &["--rate", "1/2"]].concat(),
        [&["sample", "general-code"][..], &space, &["--rate", "0.5"]].concat(),
    ];
    for c in cases {
        let mut args = c.clone();
        args.extend(["--trials", "3", "--format", "json"]);
        let o = srk(&args);
        assert!(o.status.success(), "{c:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(json_records(&o).iter().all(|r| r["seed"].is_u64() && r["trials"] == 3));
    }
}

#[test]
fn experiments_run() {
    let space = ["--q", "2", "--m", "1", "--eta", "1", "--ell", "4"];
    let cases: Vec<Vec<&str>> = vec![
        [&["experiment", "span-correlation"][..], &space, &["--rho", "0.5", "--gamma", "3", "--k-factor", "2"]].concat(),
        [&["experiment", "subset-event"][..], &space, &["--rho", "0.5", "--a", "100,010,110"]].concat(),
        vec!["experiment", "dimension", "--q", "2", "--eta", "3", "--ell", "2", "--wx", "3", "--wy", "3", "--alpha", "1/3"],
        vec!["experiment", "dimension", "--q", "2", "--eta", "3", "--ell", "2", "--wx", "3", "--wy", "3", "--d", "0"],
    ];
    for c in cases {
        let mut args = c.clone();
        args.extend(["--trials", "500", "--format", "json"]);
        let o = srk(&args);
        assert!(o.status.success(), "{c:?}: {}", String::from_utf8_lossy(&o.stderr));
        let recs = json_records(&o);
        let p = recs.iter().find(|r| r["statistic"] == "probability").unwrap();
        assert!(p["ci_low"].as_f64().unwrap() <= p["ci_high"].as_f64().unwrap());
    }
}

#[test]
fn chain_with_explicit_vectors() {
    let o = srk(&["chain", "--q", "2", "--gamma", "4", "--c", "2", "--vectors", "1100,0011", "--format", "json"]);
    assert!(o.status.success());
    let recs = json_records(&o);
    assert_eq!(value_of(&recs, "length"), "2");
    assert_eq!(value_of(&recs, "failures"), "0");
}
