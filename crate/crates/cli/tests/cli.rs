use std::fs;
use std::path::Path;
use std::process::Command;

use sgm_cli::run;

/// Runs in-process without the disk cache.
fn sgm(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = ["sgm", "--no-cache"].iter().chain(args).copied();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Runs the built binary with its cache in `cache`.
fn sgm_bin(cache: &Path, args: &[&str]) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_sgm"))
        .args(args)
        .env("SGM_CACHE_DIR", cache)
        .output()
        .unwrap();
    (output.status.code().unwrap(), String::from_utf8(output.stdout).unwrap())
}

#[test]
fn enumerate_genus_two_table() {
    let (code, out, _) = sgm(&["--quiet", "enumerate", "2", "0", "--format", "table"]);
    assert_eq!(code, 0);
    let auts: Vec<&str> = out.lines().skip(1).map(|l| l.split_whitespace().nth(2).unwrap()).collect();
    assert_eq!(auts.len(), 7);
    let mut sorted = auts.clone();
    sorted.sort();
    assert_eq!(sorted, ["1", "12", "2", "2", "2", "8", "8"]);
}

#[test]
fn enumerate_json_and_unstable() {
    let (code, out, _) = sgm(&["--quiet", "enumerate", "0", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["aut"], "6");

    let (code, _, err) = sgm(&["enumerate", "0", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("unstable"));
}

#[test]
fn enumerate_dot_has_one_cluster_per_graph() {
    let (code, out, _) = sgm(&["--quiet", "enumerate", "1", "2", "--format", "dot"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("subgraph cluster_").count(), 5);
}

#[test]
fn poset_views() {
    let (code, out, _) = sgm(&["--quiet", "poset", "0", "5", "--hasse"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("0 > 1"));
    assert!(lines[1].starts_with("1 > 2"));

    let (code, out, _) = sgm(&["--quiet", "poset", "0", "4", "--dot"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("[label=").count(), 2);
    assert_eq!(out.matches("->").count(), 1);

    let (code, out, _) = sgm(&["--quiet", "poset", "1", "2", "--check-mobius"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("ok").count(), 5);
}

#[test]
fn euler_subcommand() {
    let (code, out, _) = sgm(&["--quiet", "euler", "--max-chi", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("119/1440"));
    assert!(out.starts_with("g,n,chi_open,chi_closed\n"));

    let (code, _, _) = sgm(&["--quiet", "euler", "--max-chi", "3", "--roundtrip"]);
    assert_eq!(code, 0);

    let (code, _, _) = sgm(&["--quiet", "euler", "--max-chi", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn euler_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chi.csv");
    let json = dir.path().join("chi.json");
    assert_eq!(sgm(&["--quiet", "euler", "--max-chi", "2", "--out", csv.to_str().unwrap()]).0, 0);
    assert_eq!(sgm(&["--quiet", "euler", "--max-chi", "2", "--out", json.to_str().unwrap()]).0, 0);
    assert!(fs::read_to_string(&csv).unwrap().contains("1,1,-1/12,5/12"));
    let parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["entries"].as_array().unwrap().len(), 5);

    let missing = dir.path().join("no/such/dir/chi.csv");
    assert_eq!(sgm(&["--quiet", "euler", "--max-chi", "1", "--out", missing.to_str().unwrap()]).0, 3);
}

#[test]
fn duality_checks() {
    assert_eq!(sgm(&["--quiet", "duality", "1", "1", "--check-involution"]).0, 0);
    assert_eq!(sgm(&["--quiet", "duality", "0", "4", "--check-sum"]).0, 0);
    let (code, out, _) = sgm(&["--quiet", "duality", "2", "0", "--oracle"]);
    assert_eq!(code, 0);
    assert!(out.contains("on 7 graphs"));
    let (_, out, _) = sgm(&["--quiet", "duality", "1", "1"]);
    assert_eq!(out, "phi([0]) = 1*[0] + 1/2*[1]\nphi([1]) = -1*[1]\n");
}

fn write_input(dir: &Path, body: &str) -> String {
    let path = dir.join("input.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn invert_harer_zagier_gives_closed_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(
        dir.path(),
        r#"{"(0,3)": "1", "(0,4)": "-1", "(1,1)": "-1/12", "(1,2)": "1/12", "(2,0)": "-1/240"}"#,
    );
    let (code, out, _) = sgm(&["--quiet", "invert", "--input", &input, "--kappa", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("\n0,4,-1,2,-1\n"));
    assert!(out.contains("\n1,1,-1/12,5/12,-1/12\n"));
    assert!(out.contains("\n1,2,1/12,1/2,1/12\n"));
    assert!(out.contains("\n2,0,-1/240,119/1440,-1/240\n"));
}

#[test]
fn invert_zero_and_random() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), r#"{"(0,3)": "0", "(1,1)": "0", "(0,4)": "0"}"#);
    let (code, out, _) = sgm(&["--quiet", "invert", "--input", &input]);
    assert_eq!(code, 0);
    for line in out.lines().skip(1) {
        assert!(line.ends_with(",0,0,0"), "{line}");
    }

    let input = write_input(
        dir.path(),
        r#"{"(0,3)": "3/5", "(0,4)": "-2", "(0,5)": "7/3", "(1,1)": "1/9", "(1,2)": "-4/7", "(1,3)": "5", "(2,0)": "2/11", "(2,1)": "-1/2"}"#,
    );
    let (code, out, _) = sgm(&["--quiet", "invert", "--input", &input, "--kappa", "7/3"]);
    assert_eq!(code, 0, "{out}");
    for line in out.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], cols[4], "{line}");
    }

    let input = write_input(dir.path(), r#"{"(1,1)": "1"}"#);
    assert_eq!(sgm(&["--quiet", "invert", "--input", &input]).0, 2);
    let missing = dir.path().join("absent.json");
    assert_eq!(sgm(&["--quiet", "invert", "--input", missing.to_str().unwrap()]).0, 3);
}

#[test]
fn gaussian_report() {
    let (code, out, _) = sgm(&["--quiet", "gaussian", "--max-chi", "3"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["roundtrip"]["holds"], true);
    let entries = report["oracle"].as_array().unwrap();
    assert_eq!(entries.len(), 8);
    assert!(entries.iter().all(|e| e["match"] == true));
}

#[test]
fn banner_and_usage() {
    let (code, _, err) = sgm(&["enumerate", "0", "3"]);
    assert_eq!(code, 0);
    assert!(err.starts_with("sgm "));
    let (_, _, err) = sgm(&["--quiet", "enumerate", "0", "3"]);
    assert!(err.is_empty());
    assert_eq!(sgm(&["frobnicate"]).0, 2);
    assert_eq!(sgm(&["--help"]).0, 0);
}

#[test]
fn cache_is_transparent_and_output_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cold = sgm_bin(dir.path(), &["--quiet", "euler", "--max-chi", "3"]);
    assert_eq!(cold.0, 0);
    assert!(dir.path().join("catalog-g1-n3.json").exists());
    assert!(dir.path().join("catalog-g1-n3.meta.json").exists());
    let warm = sgm_bin(dir.path(), &["--quiet", "euler", "--max-chi", "3"]);
    assert_eq!(cold, warm);
    let uncached = sgm(&["--quiet", "euler", "--max-chi", "3"]);
    assert_eq!(uncached.1, cold.1);

    // a corrupted entry is rebuilt rather than trusted
    fs::write(dir.path().join("catalog-g2-n0.json"), "{}").unwrap();
    let (code, out) = sgm_bin(dir.path(), &["--quiet", "enumerate", "2", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 8);

    let a = sgm_bin(dir.path(), &["--quiet", "poset", "2", "0", "--dot"]);
    let b = sgm_bin(dir.path(), &["--quiet", "poset", "2", "0", "--dot"]);
    assert_eq!(a, b);
}
