//! End-to-end checks of the `capbody` binary: subcommand pipelines, output
//! determinism and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capbody"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("capbody-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_is_deterministic() {
    let a = run(&["generate", "central-s2", "--seed", "7", "--n-caps", "12"]);
    let b = run(&["generate", "central-s2", "--seed", "7", "--n-caps", "12"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = run(&["generate", "central-s2", "--seed", "8", "--n-caps", "12"]);
    assert_ne!(a.stdout, c.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dim"], 3);
    assert_eq!(v["caps"].as_array().unwrap().len(), 12);
    // dim leads the document, as documented.
    assert!(text.trim_start().starts_with("{\n  \"dim\""));
}

#[test]
fn generate_csv_has_header_and_rows() {
    let out = run(&["generate", "canned:four-2t", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,x4,radius");
    assert_eq!(lines.count(), 4);
}

#[test]
fn solve_verify_pipeline_s2_and_s3() {
    let dir = tmpdir("pipeline");
    for (canned, dim, count) in [("octahedron-s2", 3, 6), ("eight-3t", 4, 8)] {
        let packing = dir.join(format!("{canned}.json"));
        let solution = dir.join(format!("{canned}-sol.json"));
        let st = bin()
            .args(["generate", &format!("canned:{canned}")])
            .args(["--out", packing.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(st.success());

        let st = bin()
            .args(["solve", packing.to_str().unwrap()])
            .args(["--out", solution.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(st.success());
        let sol: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&solution).unwrap()).unwrap();
        assert_eq!(sol["dim"], dim);
        assert_eq!(sol["directions"].as_array().unwrap().len(), count);

        let out = run(&[
            "verify",
            packing.to_str().unwrap(),
            solution.to_str().unwrap(),
            "--oracle",
            "5000",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let report: serde_json::Value =
            serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(report["oracle"]["unlit"], 0);
    }
}

#[test]
fn verify_rejects_unrotated_axes_on_diagonal_octahedron() {
    let dir = tmpdir("unrotated");
    let packing = dir.join("oct.json");
    assert!(bin()
        .args(["generate", "canned:octahedron-s2"])
        .args(["--out", packing.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let axes = write(
        &dir,
        "axes.json",
        r#"{"dim":3,"directions":[[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]]}"#,
    );
    let out = run(&["verify", packing.to_str().unwrap(), axes.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report["failure"]
        .as_str()
        .unwrap()
        .contains("not separated"));
}

#[test]
fn solve_rejects_asymmetric_packing_with_exit_2() {
    let dir = tmpdir("asym");
    let packing = write(
        &dir,
        "single.json",
        r#"{"dim":3,"caps":[{"center":[0,0,1],"radius":0.5}]}"#,
    );
    let out = run(&["solve", packing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("centrally symmetric"));
}

#[test]
fn validate_reports_symmetries_and_rejects_overlap() {
    let dir = tmpdir("validate");
    let good = write(
        &dir,
        "good.json",
        r#"{"dim":3,"caps":[
            {"center":[0,0,1],"radius":0.5},
            {"center":[0,0,-1],"radius":0.5}]}"#,
    );
    let out = run(&["validate", good.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report["valid"], true);
    assert_eq!(report["centrally_symmetric"], true);

    // An overlapping packing is rejected while parsing (exit 2).
    let bad = write(
        &dir,
        "bad.json",
        r#"{"dim":3,"caps":[
            {"center":[0,0,1],"radius":1.0},
            {"center":[1,0,0],"radius":1.0}]}"#,
    );
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cases_audit_passes() {
    let out = run(&["cases", "--audit", "--resolution", "0.005", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("check,"));
    assert!(text.contains("stranded distance"));
    for line in lines {
        assert!(line.ends_with(",true"), "failing audit row: {line}");
    }
}

#[test]
fn stranded_single_cap_body() {
    let dir = tmpdir("stranded");
    let packing = write(
        &dir,
        "one.json",
        r#"{"dim":3,"caps":[{"center":[0,0,1],"radius":0.7853981633974483}]}"#,
    );
    let out = run(&["stranded", packing.to_str().unwrap(), "--resolution", "20000"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let dist = v["dist"].as_f64().unwrap();
    assert!((dist - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-6);
}

#[test]
fn generate_unconditional_with_seed_family() {
    let out = run(&[
        "generate",
        "unconditional-s3",
        "--seed-family",
        "sixteen-4t",
        "--n-caps",
        "8",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["dim"], 4);
    assert!(v["caps"].as_array().unwrap().len() >= 16);
}

#[test]
fn body_input_accepted_everywhere() {
    let dir = tmpdir("body");
    let body = write(
        &dir,
        "body.json",
        r#"{"dim":3,"vertices":[[0,0,2],[0,0,-2]]}"#,
    );
    assert!(run(&["validate", body.to_str().unwrap()]).status.success());
    let out = run(&["solve", body.to_str().unwrap()]);
    assert!(out.status.success());
}
