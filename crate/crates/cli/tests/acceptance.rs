//! CLI acceptance: criterion 8 (byte-identical CSV/JSON artifacts across
//! repeated runs and across thread counts 1, 4, 8) plus the exit-code
//! contract and per-command artifact checks.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rotor() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotor"))
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

const BASE_CONFIG: &str = r#"
[map]
family = "two_shear"
a = 1.04
b = 1.04

[grid]
resolution = 48

[run]
n_schedule = [100, 200, 400]
seed = 7
directions = 8

[staircase]
dir = "3/2"

[periodic]
q = 1
p = 0
s = 0
seed_resolution = 6

[leb]
method = "monte_carlo"
samples = 200000
"#;

fn run_cmd(cmd: &str, config: &Path, out: &Path, threads: u32, extra: &[&str]) -> Output {
    rotor()
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .args(extra)
        .output()
        .expect("spawn rotor")
}

/// Gather the bytes of every CSV/JSON artifact in a directory.
fn artifact_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().to_string_lossy().to_string();
        if name.ends_with(".csv") || name.ends_with(".json") {
            out.insert(name, fs::read(entry.path()).unwrap());
        }
    }
    out
}

#[test]
fn criterion_8_byte_reproducibility() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), BASE_CONFIG);
    let commands = [
        "rotset",
        "boyland",
        "deviate",
        "staircase",
        "periodic",
        "leb",
    ];

    let mut all_ok = true;
    for cmd in commands {
        let mut snapshots: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
        for (label, threads) in [("t1a", 1u32), ("t1b", 1), ("t4", 4), ("t8", 8)] {
            let out = tmp.path().join(format!("{cmd}-{label}"));
            let result = run_cmd(cmd, &config, &out, threads, &[]);
            assert!(
                result.status.success(),
                "{cmd} failed: {}",
                String::from_utf8_lossy(&result.stderr)
            );
            snapshots.push(artifact_bytes(&out));
        }
        let reference = &snapshots[0];
        assert!(!reference.is_empty(), "{cmd} produced no artifacts");
        let identical = snapshots.iter().all(|s| s == reference);
        println!(
            "acceptance criterion 8 [{cmd}]: {} ({} artifacts × 2 runs × threads 1/4/8)",
            if identical {
                "byte-identical"
            } else {
                "MISMATCH"
            },
            reference.len()
        );
        all_ok &= identical;
    }
    println!(
        "acceptance criterion 8: {}",
        if all_ok { "PASS" } else { "FAIL" }
    );
    assert!(all_ok);
}

#[test]
fn exit_code_2_on_missing_family() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "[map]\na = 1.0\nb = 1.0\n");
    let out = run_cmd("rotset", &config, &tmp.path().join("out"), 1, &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing key: family"), "stderr: {stderr}");
}

#[test]
fn exit_code_2_on_syntax_error_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "[map\nfamily = \"translation\"\n");
    let out = run_cmd("rotset", &config, &tmp.path().join("out"), 1, &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
}

#[test]
fn exit_code_4_on_evaluation_fault() {
    let tmp = tempfile::tempdir().unwrap();
    // deck-commuting but singular on the line x = 1/4, which the 2×2
    // midpoint grid hits exactly
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "expression"
expr_x = "x"
expr_y = "y + 0.000001/sin(2*pi*(x - 0.25))"

[grid]
resolution = 2

[run]
n_schedule = [2, 4]
"#,
    );
    let out = run_cmd("rotset", &config, &tmp.path().join("out"), 1, &[]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("seed"),
        "fault names the seed point: {stderr}"
    );
}

#[test]
fn boyland_translation_is_indeterminate_with_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "translation"
alpha = 0.25
beta = 0.75

[grid]
resolution = 8

[run]
n_schedule = [4, 8]
"#,
    );
    let out = run_cmd("boyland", &config, &tmp.path().join("out"), 1, &[]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("indeterminate"), "stderr: {stderr}");
    let verdict = fs::read_to_string(tmp.path().join("out/verdict.json")).unwrap();
    assert!(verdict.contains("BoundaryIndeterminate"));
}

#[test]
fn boyland_non_area_preserving_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "expression"
expr_x = "x+0.1*sin(2*pi*x)"
expr_y = "y"

[grid]
resolution = 8

[run]
n_schedule = [4, 8]
"#,
    );
    let out = run_cmd("boyland", &config, &tmp.path().join("out"), 1, &[]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not area preserving"), "stderr: {stderr}");
    let verdict = fs::read_to_string(tmp.path().join("out/verdict.json")).unwrap();
    assert!(verdict.contains("NotAreaPreserving"));
}

#[test]
fn staircase_exact_direction_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), BASE_CONFIG);
    let out_dir = tmp.path().join("out");
    let out = run_cmd("staircase", &config, &out_dir, 1, &["--dir", "3/2"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("staircase.csv")).unwrap();
    // header + 5 steps
    assert_eq!(csv.lines().count(), 6, "csv: {csv}");
    let json = fs::read_to_string(out_dir.join("staircase.json")).unwrap();
    assert!(
        json.contains("\"rational_period\": [\n      3,\n      2\n    ]")
            || json.contains("[3,2]")
            || json
                .replace([' ', '\n'], "")
                .contains("\"rational_period\":[3,2]"),
        "json: {json}"
    );
}

#[test]
fn deviate_translation_all_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "translation"
alpha = 0.3
beta = 0.9

[grid]
resolution = 4

[run]
n_schedule = [5, 10, 20]
directions = 4
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run_cmd("deviate", &config, &out_dir, 1, &[]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("deviations.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let d: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(d.abs() < 1e-10, "nonzero deviation {d}");
        rows += 1;
    }
    assert_eq!(rows, 12); // 4 directions × 3 schedule points
}

#[test]
fn periodic_two_shear_four_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "two_shear"
a = 1.2
b = 1.2

[grid]
resolution = 16

[run]
n_schedule = [50, 100]

[periodic]
q = 1
p = 0
s = 0
seed_resolution = 8
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run_cmd("periodic", &config, &out_dir, 1, &[]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("orbits.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5, "header + 4 fixed points: {csv}");
    assert!(csv.contains("Saddle"));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("4 orbit(s) found"));
}

#[test]
fn rotset_translation_single_vertex() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
[map]
family = "translation"
alpha = 0.25
beta = 0.75

[grid]
resolution = 4

[run]
n_schedule = [2, 4]
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = run_cmd("rotset", &config, &out_dir, 1, &[]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("hull.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header + one vertex: {csv}");
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("2.5000000000000000e-1,"));
}

#[test]
fn refine_flag_produces_refined_hull() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), BASE_CONFIG);
    let out_dir = tmp.path().join("out");
    let out = run_cmd("rotset", &config, &out_dir, 2, &["--refine"]);
    assert!(out.status.success());
    let diag = fs::read_to_string(out_dir.join("diagnostics.json")).unwrap();
    assert!(diag.contains("refined_hull"));
}
