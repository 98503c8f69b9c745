use std::path::Path;
use std::process::{Command, Output};

use slab::manifest::RunManifest;

fn slab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slab")).args(args).env_remove("SLAB_DATA_DIR").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_set(dir: &Path, n: &str) -> String {
    let path = dir.join(format!("set{n}.slab"));
    let out = slab(&["generate", "--kind", "random", "--d", "2", "--n", n, "--delta", "0.5", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn help_lists_every_subcommand() {
    let out = slab(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["calibrate", "generate", "dichotomy", "pinned", "decay", "maximal", "thm61", "equivalence", "lemma41", "lemma42"] {
        assert!(text.contains(cmd), "missing {cmd}");
    }
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(code(&slab(&["decay", "--nonsense"])), 2);
    assert_eq!(code(&slab(&["decay", "--d", "three"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "d = 3\nwhatever = 1\n").unwrap();
    let out = slab(&["decay", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("whatever"));
    assert_eq!(code(&slab(&["lemma41", "--set", "/nonexistent/set.slab", "--eta", "0.01", "--lambda", "1"])), 2);
    assert_eq!(code(&slab(&["lemma41", "--eta", "0.01", "--lambda", "1"])), 2);
}

#[test]
fn numerical_preconditions_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), "64");
    // η above δ/10.
    assert_eq!(code(&slab(&["lemma41", "--set", &set, "--eta", "0.2", "--lambda", "1"])), 3);
    // λ above η⁴N.
    let out = slab(&["dichotomy", "--set", &set, "--eps", "0.05", "--eta", "0.45", "--lambda", "8", "--c0", "1", "--c-cal", "1e6"]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&slab(&["equivalence", "--d", "3", "--k", "3"])), 2);
}

#[test]
fn failed_checks_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let set = write_set(dir.path(), "256");
    // A tiny ε and a huge floor leave neither alternative standing.
    let out = slab(&[
        "dichotomy", "--set", &set, "--eps", "0.001", "--eta", "0.45", "--lambda", "8", "--c0", "1e12", "--c-cal", "1e12",
        "--out", dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["branch"], "indeterminate");
}

#[test]
fn flags_override_config_and_reports_reference_their_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "d = 2\nj = 1\nhi = 1\nper_decade = 3\n").unwrap();
    let out_path = dir.path().join("decay.csv");
    let out = slab(&["decay", "--config", cfg.to_str().unwrap(), "--d", "3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("R,I,I_tilde,envelope\n"));
    // d = 3, j = 1: I(R) = sinc²(2πR) vanishes at R = 1.
    let at_one: f64 = csv.lines().find(|l| l.starts_with("1,")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(at_one.abs() < 1e-12);
    let manifest = RunManifest::read(&dir.path().join("decay.csv.manifest.json")).unwrap();
    assert_eq!(manifest.command, "decay");

    let json_path = dir.path().join("l42.json");
    let set = write_set(dir.path(), "64");
    let out = slab(&["lemma42", "--set", &set, "--eta", "0.05", "--lambda", "4", "--out", json_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let manifest = RunManifest::read(&dir.path().join("l42.json.manifest.json")).unwrap();
    assert_eq!(report["manifest_hash"], manifest.hash());
}

#[test]
fn data_dir_sets_the_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_slab"))
        .args(["decay", "--d", "4", "--j", "2", "--hi", "1", "--per-decade", "2"])
        .env("SLAB_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("decay.csv").exists());
    assert!(dir.path().join("decay.csv.manifest.json").exists());
}
