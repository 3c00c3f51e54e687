use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmc-index")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zoo_writes_meshes_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["zoo", "flat_torus_s3", "--r", "0.7071067811865476", "--nu", "64", "--nv", "64", "--out", "t.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.contains("genus 1") && (line.contains("H = -0.000000") || line.contains("H = 0.000000")), "{line}");
    let doc = json(&dir.path().join("t.json"));
    assert_eq!(doc["ambient"], "S3");
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 4096);
    for key in ["normal", "frame", "shape_op", "H", "K"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }

    let o = run(&["zoo", "sphere_r3", "--radius", "1", "--level", "4", "--out", "s.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("genus 0, H = 1.000000"), "{}", stdout(&o));

    // without --out the mesh goes to stdout and the summary to stderr
    let o = run(&["zoo", "sphere_r3", "--level", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["faces"].as_array().unwrap().len(), 80);
}

#[test]
fn bad_generators_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["zoo", "flat_torus_s3", "--r", "1.5"], dir.path())), 28);
    assert_eq!(code(&run(&["zoo", "hyperboloid"], dir.path())), 27);
    assert_eq!(code(&run(&["zoo", "sphere_r3", "--level", "9"], dir.path())), 28);
    assert_eq!(code(&run(&["zoo", "flat_torus_t3", "--lattice", "1,0,0,2,0,0,0,0,1"], dir.path())), 28);
    assert_eq!(code(&run(&["zoo", "sphere_r3", "--alpha-sign", "2"], dir.path())), 2);
}

#[test]
fn index_reports_certify_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["index", "--generator", "clifford_torus", "--nu", "64", "--out", "c.json"], dir.path());
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("c.json"));
    assert!(r["result"]["index_estimate"].as_u64().unwrap() >= 1);
    assert_eq!(r["result"]["bound_satisfied"], true);
    assert_eq!(r["result"]["matching_variant"], "double");
    assert_eq!(r["config"]["command"], "index");
    assert_eq!(r["config"]["generator"], "clifford_torus");
    assert!(r["version"]["git"].is_string());

    let o = run(&["index", "--generator", "flat_torus_t3", "--nu", "24", "--nv", "24", "--out", "f.json"], dir.path());
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("f.json"));
    assert_eq!(r["result"]["bound_required"], false);
    assert_eq!(r["result"]["index_estimate"], 0);

    std::fs::write(dir.path().join("bad.off"), "OFF\n3 1\n0 0 0\n").unwrap();
    assert_eq!(code(&run(&["index", "--mesh", "bad.off"], dir.path())), 10);
    assert_eq!(code(&run(&["index", "--mesh", "missing.json"], dir.path())), 29);
    assert_eq!(code(&run(&["index", "--generator", "cylinder_r3"], dir.path())), 13);
    assert_eq!(code(&run(&["index"], dir.path())), 28);
}

#[test]
fn index_with_full_spectrum_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["index", "--generator", "flat_torus_s3", "--r", "0.6", "--nu", "20", "--nv", "20", "--full-spectrum", "8", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("space,k,eigenvalue"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.iter().filter(|l| l.starts_with("harmonic,")).count(), 2);
    assert_eq!(rows.iter().filter(|l| l.starts_with("full,")).count(), 8);
}

#[test]
fn single_thread_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["report", "--generator", "flat_torus_s3", "--r", "0.6", "--nu", "24", "--nv", "24", "--full-spectrum", "6", "--threads", "1"];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["result"]["analysis"]["genus"], 1);
    assert_eq!(r["result"]["index"]["full_space"]["eigenvalues"].as_array().unwrap().len(), 6);
}

#[test]
fn config_files_are_strict_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"generator": "clifford_torus", "nu": 12, "eps_neg": 1e-6}"#).unwrap();
    let o = run(&["index", "--config", "run.json", "--nu", "16", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["config"]["nu"], 16);
    assert_eq!(r["result"]["eps_neg"], 1e-6);
    assert!(r["result"]["surface"].as_str().unwrap().contains("16x16"));

    std::fs::write(&cfg, r#"{"generator": "clifford_torus", "eps_negative": 1e-6}"#).unwrap();
    assert_eq!(code(&run(&["index", "--config", "run.json"], dir.path())), 28);
    std::fs::write(&cfg, r#"{"command": "verify", "generator": "clifford_torus"}"#).unwrap();
    assert_eq!(code(&run(&["index", "--config", "run.json"], dir.path())), 28);
}

#[test]
fn loaded_meshes_accept_ambient_and_sign_overrides() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["zoo", "clifford_torus", "--nu", "24", "--out", "c.json"], dir.path())), 0);
    let a = run(&["index", "--mesh", "c.json"], dir.path());
    let b = run(&["index", "--mesh", "c.json", "--alpha-sign", "-1"], dir.path());
    let (a, b): (Value, Value) = (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(a["result"]["index_estimate"], b["result"]["index_estimate"]);
    assert_eq!(b["config"]["alpha_sign"], -1);

    let off = "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
    std::fs::write(dir.path().join("tet.off"), off).unwrap();
    let o = run(&["analyze", "--mesh", "tet.off", "--ambient", "R3"], dir.path());
    assert_eq!(code(&o), 21, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn analyze_and_harmonic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--generator", "sphere_r3", "--level", "3"], dir.path());
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["result"]["genus"], 0);
    assert!(r["result"]["residuals"]["gauss_bonnet"].as_f64().unwrap() < 1e-9);

    let o = run(&["analyze", "--generator", "cylinder_r3", "--format", "csv"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("vertex,H,K\n"));

    let o = run(&["harmonic", "--generator", "flat_torus_s3", "--nu", "16", "--nv", "16"], dir.path());
    assert_eq!(code(&o), 0);
    let b: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<_> = b.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["forms", "gram"]);
    assert_eq!(b["forms"].as_array().unwrap().len(), 2);

    let o = run(&["harmonic", "--generator", "sphere_r3", "--level", "2", "--format", "csv"], dir.path());
    assert_eq!(stdout(&o).lines().next(), Some("edge"));
}

#[test]
fn verify_suite_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
    let r = json(&dir.path().join("v.json"));
    assert_eq!(r["result"]["all_passed"], true);

    let o = run(&["verify", "--alpha-sign", "-1"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = run(&["verify", "--control", "--out", "v.csv", "--format", "csv"], dir.path());
    assert_eq!(code(&o), 1);
    let csv = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("tension_refinement,\"perturbed") && l.ends_with("false")));
}
