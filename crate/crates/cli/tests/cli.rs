//! End-to-end CLI tests on the bundled fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logsymp"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logsymp-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn classify_logtan_elliptic_reports_unique_hausdorff() {
    let dir = tmpdir("logtan");
    let report = dir.join("poset.report.json");
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "3"])
        .arg(fixture("elliptic-logtan.json"))
        .arg("-o")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("hausdorff: 1"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let hausdorff = parsed["elements"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["hausdorff"].as_bool().unwrap())
        .count();
    assert_eq!(hausdorff, 1);
}

#[test]
fn classify_output_is_byte_stable() {
    let dir = tmpdir("stable");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for path in [&a, &b] {
        let out = bin()
            .args(["classify", "--mode", "logsymp-hausdorff", "--bound", "5"])
            .arg(fixture("elliptic-logsymp.json"))
            .arg("-o")
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("elements: 6"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn hasse_renders_chain_as_two_covers() {
    let dir = tmpdir("hasse");
    let report = dir.join("chain.report.json");
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "2"])
        .arg(fixture("single-z-vertex.json"))
        .arg("-o")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success());
    let dot_path = dir.join("chain.dot");
    let out = bin()
        .args(["hasse"])
        .arg(&report)
        .arg("-o")
        .arg(&dot_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert_eq!(dot.matches(" -> ").count(), 2);
}

#[test]
fn classify_dot_output() {
    let dir = tmpdir("dot");
    let path = dir.join("poset.dot");
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "2", "--format", "dot"])
        .arg(fixture("elliptic-logtan.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph hasse"));
}

#[test]
fn classify_local_brute_force_counts() {
    let dir = tmpdir("local");
    let path = dir.join("local.report.json");
    let out = bin()
        .args(["classify-local"])
        .arg(fixture("local-logtan-or.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("elements: 14"));
    assert!(stdout(&out).contains("hausdorff: 3"));
}

#[test]
fn verify_mt_accepts_trivial_family() {
    let dir = tmpdir("mt");
    let path = dir.join("mt.report.json");
    let out = bin()
        .args(["verify-mt"])
        .arg(fixture("mapping-torus.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("accepted: true"));
    assert!(stdout(&out).contains("ssc hausdorff: true"));
}

#[test]
fn verify_model_runs_reduced_samples() {
    let dir = tmpdir("model");
    let path = dir.join("model.report.json");
    let out = bin()
        .args(["verify-model", "--samples", "300"])
        .arg(fixture("symp-model.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for check in ["axioms", "anchor", "multiplicative", "blowdown"] {
        assert!(text.contains(&format!("{check}: pass")), "{text}");
    }
}

#[test]
fn period_prints_agreeing_values() {
    let out = bin().args(["period", "--t", "0.5"]).output().unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let agm = parsed["agm"].as_f64().unwrap();
    assert!((agm - 3.7081493546).abs() < 1e-9);
    assert!(parsed["relativeDifference"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn period_rejects_out_of_range() {
    let out = bin().args(["period", "--t", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_surface_affine_line() {
    let dir = tmpdir("surface");
    let path = dir.join("line.report.json");
    let out = bin()
        .args(["analyze-surface"])
        .arg(fixture("surface-affine-line.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("regions: 2, curves: 1"));
}

#[test]
fn hausdorff_flag_filters_the_poset() {
    let dir = tmpdir("hfilter");
    let path = dir.join("filtered.report.json");
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "3", "--hausdorff"])
        .arg(fixture("elliptic-logtan.json"))
        .arg("-o")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("elements: 1, hausdorff: 1"));
}

#[test]
fn invalid_input_exits_one() {
    let dir = tmpdir("bad");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"vertices\": 3}").unwrap();
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "2"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_land_beside_inputs_by_default() {
    let dir = tmpdir("beside");
    let input = dir.join("graph.json");
    std::fs::copy(fixture("single-z-vertex.json"), &input).unwrap();
    let out = bin()
        .args(["classify", "--mode", "logtan", "--bound", "2"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("graph.report.json").exists());
}
