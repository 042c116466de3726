use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eikotomo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const COARSE: [&str; 10] = [
    "--h", "0.04", "--sources", "6", "--receivers", "40", "--radius", "0.75", "--extent", "0.8",
];

#[test]
fn phantom_writes_grid_preview_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = eik(&["phantom", "--phantom", "example3", "--h", "0.02", "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["phantom.grid", "phantom.pgm", "phantom.json", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let m = manifest(dir.path());
    assert_eq!(m["command"], "phantom");
    assert_eq!(m["results"]["max"].as_f64(), Some(1.5));
    assert_eq!(m["results"]["min"].as_f64(), Some(1.0));
    assert!(m["files"].as_array().unwrap().iter().any(|f| f == "phantom.grid"));
}

#[test]
fn box_contrast_follows_f0() {
    let dir = tempfile::tempdir().unwrap();
    let o = eik(&["phantom", "--phantom", "example1", "--f0", "2", "--h", "0.04", "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(dir.path())["results"]["max"].as_f64(), Some(2.0));
}

#[test]
fn unknown_preset_is_a_usage_error_listing_the_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = eik(&["phantom", "--phantom", "nope", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("example3") && err.contains("ring"), "{err}");
}

#[test]
fn bad_flags_and_missing_inputs_exit_with_one() {
    assert_eq!(eik(&["phantom", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(eik(&["reconstruct", "--mode", "fbp", "--sinogram", "/no/such/file"]).status.code(), Some(1));
    assert_eq!(eik(&["run", "--recipe", "no-such-recipe"]).status.code(), Some(1));
}

#[test]
fn run_list_names_every_recipe() {
    let o = eik(&["run", "--list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for r in ["example1", "example4-noisy5", "example5", "example7-noisy1"] {
        assert!(out.contains(r), "{r} missing from\n{out}");
    }
}

#[test]
fn forward_is_deterministic_and_noise_follows_the_seed() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["forward", "--phantom", "example3", "--noise", "0.01", "--seed", seed];
        args.extend(COARSE);
        args.extend(["--out", s(dir.path())]);
        let o = eik(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
        (read("sinogram.eik"), read("sinogram_noisy.eik"), manifest(dir.path()))
    };
    let (clean_a, noisy_a, m) = run("7");
    let (clean_b, noisy_b, _) = run("7");
    let (clean_c, noisy_c, _) = run("8");
    assert_eq!(clean_a, clean_b);
    assert_eq!(noisy_a, noisy_b);
    assert_eq!(clean_a, clean_c);
    assert_ne!(noisy_a, noisy_c);
    assert_eq!(m["parameters"]["noise"]["seed"], 7);
    assert_eq!(m["results"]["converged"], true);
}

#[test]
fn fbp_of_homogeneous_data_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = dir.path().join("fwd");
    let rec = dir.path().join("rec");
    let mut args = vec!["forward", "--phantom", "homogeneous", "--out", s(&fwd)];
    args.extend(COARSE);
    assert!(eik(&args).status.success());

    let sino = fwd.join("sinogram.eik");
    let mut args = vec!["reconstruct", "--mode", "fbp", "--sinogram", s(&sino), "--out", s(&rec)];
    args.extend(COARSE);
    let o = eik(&args);
    assert!(o.status.success(), "{}", stderr(&o));

    let ph = dir.path().join("ph");
    assert!(eik(&["phantom", "--phantom", "homogeneous", "--h", "0.04", "--out", s(&ph)]).status.success());
    let a = rec.join("reconstruction.grid");
    let b = ph.join("phantom.grid");
    // first-order travel times leave a few percent of error at this resolution
    let o = eik(&["compare", s(&a), s(&b), "--max-l2", "0.04", "--max-linf", "0.06"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn compare_of_a_file_with_itself_is_zero_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    assert!(eik(&["phantom", "--phantom", "example2", "--h", "0.04", "--out", s(dir.path())]).status.success());
    let g = dir.path().join("phantom.grid");
    let report = dir.path().join("report.json");
    let o = eik(&["compare", s(&g), s(&g), "--max-l2", "0", "--max-linf", "0", "--report", s(&report)]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("l2    0.000000e0") && out.contains("PASS"), "{out}");
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["l2"].as_f64(), Some(0.0));
}

#[test]
fn failed_tolerance_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(eik(&["phantom", "--phantom", "example2", "--h", "0.04", "--out", s(&a)]).status.success());
    assert!(eik(&["phantom", "--phantom", "homogeneous", "--h", "0.04", "--out", s(&b)]).status.success());
    let o = eik(&["compare", s(&a.join("phantom.grid")), s(&b.join("phantom.grid")), "--max-linf", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn grid_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(eik(&["phantom", "--phantom", "example2", "--h", "0.04", "--out", s(&a)]).status.success());
    assert!(eik(&["phantom", "--phantom", "example2", "--h", "0.02", "--out", s(&b)]).status.success());
    let o = eik(&["compare", s(&a.join("phantom.grid")), s(&b.join("phantom.grid"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn sinogram_header_is_checked_against_expected_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = dir.path().join("fwd");
    let mut args = vec!["forward", "--phantom", "homogeneous", "--out", s(&fwd)];
    args.extend(COARSE);
    assert!(eik(&args).status.success());
    let sino = fwd.join("sinogram.eik");
    let rec = dir.path().join("rec");
    let o = eik(&[
        "reconstruct", "--mode", "fbp", "--sinogram", s(&sino), "--h", "0.04", "--sources", "9", "--out", s(&rec),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sources"), "{}", stderr(&o));
}

#[test]
fn thread_count_must_be_numeric() {
    let o = Command::new(env!("CARGO_BIN_EXE_eikotomo"))
        .args(["run", "--list"])
        .env("EIK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
