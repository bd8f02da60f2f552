use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockpinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn entries(matrix: &Value) -> Vec<String> {
    matrix["data"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn check_example1_has_a_side_only() {
    let ex1 = fixture("example1.json");
    for mode in ["float", "rational"] {
        let v = json(&["--mode", mode, "check", path(&ex1)]);
        let incl = &v["inclusions"];
        assert_eq!(incl["incl_B_A"]["holds"], true);
        assert_eq!(incl["incl_Ct_At"]["holds"], true);
        assert_eq!(incl["incl_C_D"]["holds"], false);
        assert_eq!(v["applicable"]["via-F"]["holds"], true);
        assert_eq!(v["applicable"]["pinv_h_equals_j"]["holds"], false);
        assert_eq!(v["pinv_h_equals_j"], false);
    }
}

#[test]
fn pinv_of_identity_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("identity.txt");
    std::fs::write(&file, "1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let v = json(&["--mode", "rational", "pinv", path(&file)]);
    assert_eq!(entries(&v["pinv"]), ["1", "0", "0", "0", "1", "0", "0", "0", "1"]);
    assert_eq!(v["rank"], 3);
    let v = json(&["pinv", path(&file)]);
    let flat: Vec<f64> = v["pinv"]["data"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .collect();
    assert_eq!(flat, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn block_pinv_example2_is_exact() {
    let v = json(&["--mode", "rational", "block-pinv", path(&fixture("example2.json")), "--formula", "f"]);
    let got = entries(&v["value"]);
    let want = ["0", "0", "0", "-1/2", "0", "0", "0", "1/2", "1/15", "2/15", "2/3", "1", "-1/15", "-2/15", "1/3", "0"];
    assert_eq!(got, want);
    assert_eq!(v["sound"], true);
    assert_eq!(v["agrees_with_pinv"], true);
}

#[test]
fn rational_mode_never_prints_decimals() {
    let ex1 = fixture("example1.json");
    for args in [
        vec!["pinv", path(&ex1)],
        vec!["ppt", path(&ex1)],
        vec!["ppt", path(&ex1), "--relative-to", "d"],
        vec!["schur", path(&ex1)],
        vec!["block-pinv", path(&ex1), "--formula", "mixed"],
    ] {
        let mut all = vec!["--mode", "rational"];
        all.extend(args.iter().copied());
        let text = String::from_utf8(run(&all).stdout).unwrap();
        let matrix_lines: Vec<&str> = text.lines().filter(|l| !l.contains('=') && !l.contains(':')).collect();
        for line in matrix_lines {
            assert!(!line.contains('.'), "decimal in {args:?}: {line}");
        }
        let v = json(&all);
        let value = v.get("value").or(v.get("pinv")).unwrap();
        for e in entries(value) {
            assert!(e.chars().all(|c| c.is_ascii_digit() || c == '-' || c == '/'), "{e}");
        }
    }
}

#[test]
fn ppt_example1_matches_worked_values() {
    let ex1 = fixture("example1.json");
    let v = json(&["--mode", "rational", "ppt", path(&ex1)]);
    assert_eq!(entries(&v["value"]), ["1/10", "1/5", "-1/2", "-1/10", "-1/5", "1/2", "-1/5", "-2/5", "1"]);
    assert_eq!(v["value"]["row_split"], 2);
    let v = json(&["--mode", "rational", "ppt", path(&ex1), "--relative-to", "d"]);
    assert_eq!(entries(&v["value"]), ["1", "-1", "0", "2", "-2", "0", "0", "0", "0"]);
    assert_eq!(v["sound"], false);
}

#[test]
fn exit_status_contract() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n \"rows\": 2,\n \"cols\": 2,\n \"data\": [[1, 2], [3 4]]\n}").unwrap();
    let out = run(&["pinv", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:4:"));

    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"rows": 2, "cols": 2, "data": [[1, 2], [3]]}"#).unwrap();
    let out = run(&["pinv", path(&short)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("data[1]"));

    let unsplit = dir.path().join("plain.txt");
    std::fs::write(&unsplit, "1 2\n3 4\n").unwrap();
    assert_eq!(run(&["check", path(&unsplit)]).status.code(), Some(1));
    assert_eq!(run(&["pinv", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--tol", "-1", "pinv", path(&unsplit)]).status.code(), Some(1));

    let violator = fixture("carlson_violator.json");
    assert_eq!(run(&["schur", path(&violator)]).status.code(), Some(0));
    assert_eq!(run(&["schur", path(&violator), "--strict"]).status.code(), Some(2));
    let ex1 = fixture("example1.json");
    assert_eq!(run(&["--strict", "block-pinv", path(&ex1), "--formula", "f"]).status.code(), Some(0));
    assert_eq!(run(&["--strict", "block-pinv", path(&ex1), "--formula", "g"]).status.code(), Some(2));

    // a zero certificate scale cannot be met in floating point
    let out = run(&["--cert-tol", "0", "pinv", path(&fixture("example2.json"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["float", "rational"] {
        let a = dir.path().join(format!("{mode}-a.json"));
        let b = dir.path().join(format!("{mode}-b.json"));
        for file in [&a, &b] {
            let out = run(&[
                "--mode", mode, "gen", "--dims", "2,3,2,3", "--require", "a-side", "--rectangular", "--seed", "11", "-o",
                path(file),
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(text, std::fs::read_to_string(&b).unwrap());
        let out = run(&["--mode", mode, "--strict", "block-pinv", path(&a), "--formula", "f"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

        // re-serializing the parsed file reproduces it exactly
        let v = json(&["--mode", mode, "ppt", path(&a)]);
        let twice = json(&["--mode", mode, "ppt", path(&a)]);
        assert_eq!(v, twice);
        let original: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(original["row_split"], 2);
        assert_eq!(original["col_split"], 3);
    }
}

#[test]
fn gen_all_eight_then_check_strict() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("all.json");
    let out = run(&["--mode", "rational", "gen", "--require", "all", "--seed", "3", "-o", path(&file)]);
    assert!(out.status.success());
    assert_eq!(run(&["--mode", "rational", "--strict", "check", path(&file)]).status.code(), Some(0));
    let out = run(&["gen", "--require", "incl_X", "-o", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_ignores_flag_order() {
    let ex2 = fixture("example2.json");
    let a = run(&["--format", "json", "--mode", "rational", "block-pinv", path(&ex2), "--formula", "mixed", "--strict"]);
    let b = run(&["block-pinv", "--strict", "--formula", "mixed", path(&ex2), "--mode", "rational", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn verify_runs_and_reports() {
    let v = json(&["verify", "--trials", "5", "--seed", "9"]);
    assert_eq!(v["trials"], 5);
    assert_eq!(v["backend"], "float");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
    let fixtures = v["fixtures"].as_array().unwrap();
    assert!(fixtures.iter().all(|f| f["pass"] == true));
    let v = json(&["--mode", "rational", "verify", "--trials", "0"]);
    assert_eq!(v["backend"], "rational");
}
