//! End-to-end tests of the binary surface: subcommands, exit codes,
//! config errors, and artifact emission.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hopflax"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hopflax-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const HALFLINE_SOLVE: &str = r#"
[space]
kind = "halfline"
h = 0.01
patch = [[0, 10]]

[hamiltonian]
kind = "linear"

[initial]
preset = "neg_x"

[times]
values = [0.5, 1.0]
path = "eikonal-sup"
"#;

#[test]
fn experiment_list() {
    let out = bin().args(["experiment", "--list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in hopflax::experiments::NAMES {
        assert!(text.contains(name), "missing {name} in list");
    }
}

#[test]
fn unknown_experiment_exits_2() {
    let out = bin().args(["experiment", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rigidity_experiment_writes_report() {
    let dir = tmp_dir("rigidity");
    let out = bin()
        .args([
            "experiment",
            "lattice-rigidity",
            "--out",
            dir.to_str().unwrap(),
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = std::fs::read_to_string(dir.join("lattice-rigidity.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["name"], "lattice-rigidity");
    assert!(json["goldens"]
        .as_array()
        .unwrap()
        .iter()
        .all(|g| g["pass"] == true));
}

#[test]
fn solve_emits_csv_slices() {
    let dir = tmp_dir("solve");
    let cfg = write_config(&dir, "cfg.toml", HALFLINE_SOLVE);
    let out = bin()
        .args([
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("slice_1.csv")).unwrap();
    assert!(csv.starts_with("point,value,witness"));
    // canonical ordering: rows sorted lexicographically by point key
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(rows, sorted);
}

#[test]
fn missing_hamiltonian_is_config_error() {
    let dir = tmp_dir("badcfg");
    let cfg = write_config(
        &dir,
        "bad.toml",
        r#"
[space]
kind = "halfline"
h = 0.01
patch = [[0, 10]]

[initial]
preset = "neg_x"

[times]
values = [1.0]
"#,
    );
    let out = bin()
        .args([
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hamiltonian"));
}

#[test]
fn malformed_toml_is_config_error() {
    let dir = tmp_dir("parse");
    let cfg = write_config(&dir, "broken.toml", "[space\nkind=");
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_busemann_pass_and_fail_exit_codes() {
    let dir = tmp_dir("check");
    let euclid = write_config(
        &dir,
        "euclid.toml",
        r#"
[space]
kind = "euclidean"
dim = 2
p = 2.0
h = 0.5
patch = [[-2, 2], [-2, 2]]
"#,
    );
    let out = bin()
        .args([
            "check",
            "--config",
            euclid.to_str().unwrap(),
            "--notion",
            "busemann3",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let lattice = write_config(
        &dir,
        "lattice.toml",
        r#"
[space]
kind = "lattice"
h = "1/4"
patch = [[-3, 3], [-3, 3]]

[initial]
preset = "norm1"

[checks]
pair_budget = 1500
"#,
    );
    let out = bin()
        .args([
            "check",
            "--config",
            lattice.to_str().unwrap(),
            "--notion",
            "weak-geodesic",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"));

    let out = bin()
        .args([
            "check",
            "--config",
            lattice.to_str().unwrap(),
            "--notion",
            "no-such-notion",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_flag_reproduces_csv_bytes() {
    let dir1 = tmp_dir("t1");
    let dir8 = tmp_dir("t8");
    let cfg = write_config(&dir1, "cfg.toml", HALFLINE_SOLVE);
    for (threads, dir) in [("1", &dir1), ("8", &dir8)] {
        let out = bin()
            .args([
                "solve",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                dir.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(dir1.join("slice_0.csv")).unwrap();
    let b = std::fs::read(dir8.join("slice_0.csv")).unwrap();
    assert_eq!(a, b);
}
