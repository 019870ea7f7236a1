//! End-to-end tests of the binary: exit codes, determinism, report formats.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ricci-means"))
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ricci_means_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn means_on_heisenberg_matches_frame_values() {
    let out = bin()
        .args([
            "means",
            "--manifold",
            "heisenberg",
            "--plane-axes",
            "0,1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert!((v["intrinsic"].as_f64().unwrap() + 0.75).abs() < 1e-12);
    assert!((v["normal"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn identical_manifest_and_seed_give_identical_bytes() {
    let dir = tempdir();
    let manifest_path = dir.join("means.json");
    std::fs::write(
        &manifest_path,
        r#"{
            "schema": 1,
            "manifold": {"model": "space_form", "params": {"n": 4, "kappa": 1.0}},
            "task": "means",
            "task_params": {"d": 2, "seed": 24301},
            "output": {"path": "-", "format": "json"}
        }"#,
    )
    .unwrap();
    let run = || {
        let out = bin()
            .args(["run", "--manifest", manifest_path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn weitz_on_cp2_complex_line() {
    let out = bin()
        .args(["weitz", "--manifold", "cp2", "--plane-axes", "0,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // d(2n−d) = 2·(4−2) = 4 for a complex line in ℂP².
    assert!((v["pairing"].as_f64().unwrap() - 4.0).abs() < 1e-10);
    assert_eq!(v["passed"], true);
}

#[test]
fn weitz_csv_residual_table() {
    let out = bin()
        .args([
            "weitz",
            "--manifold",
            "s4",
            "--d",
            "2",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("route,value,residual"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bad_manifold_exits_2() {
    let out = bin()
        .args(["means", "--manifold", "nonexistent_space"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("machine-readable error");
    assert_eq!(err["error"]["code"], "manifest_error");
}

#[test]
fn out_of_domain_point_exits_3() {
    let out = bin()
        .args([
            "curvature",
            "--manifold",
            "heisenberg",
            "--point",
            "9,9,9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "task_error:out_of_domain");
}

#[test]
fn expand_emits_fit_table_csv() {
    let dir = tempdir();
    let path = dir.join("fits.csv");
    let out = bin()
        .args([
            "expand",
            "--manifold",
            "catenoid",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("fit,radius,density,model,residual"));
    assert!(text.contains("bdp_circumference"));
}

#[test]
fn verify_exits_zero_and_reports_pass() {
    let dir = tempdir();
    let path = dir.join("verify.json");
    let out = bin()
        .args(["verify", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() > 100);
}
