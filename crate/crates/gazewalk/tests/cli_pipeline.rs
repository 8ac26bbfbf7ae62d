//! End-to-end tests of the `gazewalk` binary: file formats, exit codes, and
//! byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gazewalk"))
}

fn write_config(dir: &Path, body: serde_json::Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn unit_window() -> serde_json::Value {
    serde_json::json!({"a": 0.0, "b": 1.0, "c": 0.0, "d": 1.0})
}

fn simulate_config(dir: &Path, n: usize, m: usize) -> PathBuf {
    write_config(
        dir,
        serde_json::json!({
            "window": unit_window(),
            "model": {"family": "rejection_recurrence",
                      "kernel": {"gaussian": {"variance": 0.3}},
                      "theta": 0.9, "radius": 0.1},
            "n": n,
            "m": m,
            "first": [{"x": 0.22, "y": 0.41}, {"x": 0.4, "y": 0.5}]
        }),
    )
}

fn read_dir_sorted(dir: &Path) -> Vec<PathBuf> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    entries
}

#[test]
fn simulate_writes_expected_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulate_config(tmp.path(), 100, 5);
    let out = tmp.path().join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--seed", "7", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let files = read_dir_sorted(&out);
    let csvs: Vec<_> = files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    assert_eq!(csvs.len(), 5);
    for csv in csvs {
        let text = std::fs::read_to_string(csv).unwrap();
        assert_eq!(text.lines().count(), 101); // header + 100 fixations
        assert!(text.starts_with("subject,order,x,y"));
    }
    assert!(out.join("manifest.json").exists());
}

#[test]
fn simulate_single_point_sequences() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({
            "window": unit_window(),
            "model": {"family": "binomial"},
            "n": 1,
            "m": 2
        }),
    );
    let out = tmp.path().join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--seed", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for i in 0..2 {
        let text = std::fs::read_to_string(out.join(format!("seq_{i:03}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 2);
    }
}

#[test]
fn malformed_json_exits_2_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("config.json");
    std::fs::write(&cfg, "{\"window\": }").unwrap();
    let output = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line"), "missing line/column diagnostic: {stderr}");
}

#[test]
fn missing_seed_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulate_config(tmp.path(), 10, 1);
    let status = bin().args(["simulate", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

fn run_simulate(cfg: &Path, out: &Path, seed: &str) {
    let status = bin()
        .args(["simulate", "--config"])
        .arg(cfg)
        .args(["--seed", seed, "--out"])
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulate_config(tmp.path(), 60, 3);
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    run_simulate(&cfg, &out1, "99");
    run_simulate(&cfg, &out2, "99");
    for (p1, p2) in read_dir_sorted(&out1).iter().zip(read_dir_sorted(&out2).iter()) {
        assert_eq!(
            std::fs::read(p1).unwrap(),
            std::fs::read(p2).unwrap(),
            "{p1:?} differs from {p2:?}"
        );
    }
    // a different seed changes the sequences
    let out3 = tmp.path().join("c");
    run_simulate(&cfg, &out3, "100");
    assert_ne!(
        std::fs::read(out1.join("seq_000.csv")).unwrap(),
        std::fs::read(out3.join("seq_000.csv")).unwrap()
    );
}

#[test]
fn saliency_excludes_subject_and_rejects_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), serde_json::json!({"window": unit_window()}));
    let data = tmp.path().join("aux.csv");
    std::fs::write(
        &data,
        "subject,order,x,y\nkeep,1,0.3,0.3\nkeep,2,0.4,0.35\ndrop,1,0.9,0.9\n",
    )
    .unwrap();
    let out = tmp.path().join("map.json");
    let status = bin()
        .args(["saliency", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--exclude-subject", "drop", "--grid", "32x32", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let raster: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(raster["nx"], 32);
    let values: Vec<f64> = raster["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((max - 1.0).abs() < 1e-12, "raster not scaled to max 1");
    // excluding the only subject leaves nothing
    let single = tmp.path().join("single.csv");
    std::fs::write(&single, "subject,order,x,y\nonly,1,0.5,0.5\n").unwrap();
    let status = bin()
        .args(["saliency", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&single)
        .args(["--exclude-subject", "only", "--out"])
        .arg(tmp.path().join("never.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

fn write_data_csv(dir: &Path) -> PathBuf {
    // simulate a short recurrent sequence through the binary, then reuse it
    let cfg = simulate_config(dir, 60, 1);
    let out = dir.join("data");
    run_simulate(&cfg, &out, "5");
    out.join("seq_000.csv")
}

#[test]
fn fit_model2_fixes_theta_and_model1_has_no_free_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data_csv(tmp.path());
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({
            "window": unit_window(),
            "scale_grid": [0.3, 0.5, 0.7],
            "quadrature": {"nx": 32, "ny": 32}
        }),
    );
    let out2 = tmp.path().join("fit2");
    let status = bin()
        .args(["fit", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--model", "2", "--out"])
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out2.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["interaction"], 0.5);
    assert!(fit["scale"].as_f64().is_some());

    let out1 = tmp.path().join("fit1");
    let status = bin()
        .args(["fit", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--model", "1", "--out"])
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["interaction"], 0.5);
    assert!(fit["scale"].is_null());
    assert!(fit["loglik"].as_f64().unwrap().is_finite());
}

#[test]
fn envelope_smoke_run_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data_csv(tmp.path());
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({
            "window": unit_window(),
            "model": {"family": "random_walk", "kernel": {"gaussian": {"variance": 0.3}}}
        }),
    );
    let out = tmp.path().join("env");
    let status = bin()
        .args(["envelope", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--seed", "3", "--m", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for stat in [
        "ball_coverage",
        "hull_coverage",
        "scanpath_length",
        "cumulative_recurrence",
    ] {
        assert!(out.join(format!("curve_{stat}.csv")).exists());
        assert!(out.join(format!("band_{stat}.csv")).exists());
        assert!(out.join(format!("plot_{stat}.svg")).exists());
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("exceedance.json")).unwrap())
            .unwrap();
    assert!(report["hull_coverage"]["fraction"].as_f64().is_some());
}

#[test]
fn envelope_without_model_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data_csv(tmp.path());
    let cfg = write_config(tmp.path(), serde_json::json!({"window": unit_window()}));
    let status = bin()
        .args(["envelope", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--seed", "3", "--m", "2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn ci_smoke_and_level_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data_csv(tmp.path());
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({
            "window": unit_window(),
            "scale_grid": [0.4, 0.6],
            "interaction_grid": [0.3, 0.6, 0.9],
            "quadrature": {"nx": 32, "ny": 32}
        }),
    );
    let out = tmp.path().join("ci");
    let status = bin()
        .args(["ci", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--seed", "3", "--b", "2", "--model", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let ci: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("ci.json")).unwrap()).unwrap();
    assert_eq!(ci["replicates"], 2);
    for p in ci["params"].as_array().unwrap() {
        assert!(p["lower"].as_f64().unwrap() <= p["upper"].as_f64().unwrap());
    }
    // invalid level
    let status = bin()
        .args(["ci", "--config"])
        .arg(&cfg)
        .arg("--data")
        .arg(&data)
        .args(["--seed", "3", "--b", "2", "--model", "4", "--level", "1.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn fit_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data_csv(tmp.path());
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({
            "window": unit_window(),
            "scale_grid": [0.3, 0.5],
            "interaction_grid": [0.3, 0.7],
            "quadrature": {"nx": 32, "ny": 32}
        }),
    );
    let mut outputs = Vec::new();
    for name in ["r1", "r2"] {
        let out = tmp.path().join(name);
        let status = bin()
            .args(["fit", "--config"])
            .arg(&cfg)
            .arg("--data")
            .arg(&data)
            .args(["--model", "4", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(out.join("fit.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
