use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rlcompile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlcompile"))
        .args(args)
        .env_remove("RLCOMPILE_WORKERS")
        .output()
        .unwrap()
}

fn small_train(out: &Path) -> Output {
    rlcompile(&[
        "train",
        "--n-qubits",
        "3",
        "--iterations",
        "40",
        "--rollouts",
        "6",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn hoeffding_required_sample_size() {
    let out = rlcompile(&["hoeffding", "--epsilon", "0.1", "--delta", "1e-4"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "m = 496");
}

#[test]
fn hoeffding_bound_for_given_m() {
    let out = rlcompile(&["hoeffding", "--epsilon", "0.1", "--m", "500"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let v: f64 = text.trim().trim_start_matches("bound = ").parse().unwrap();
    assert!((v - 2.0 * (-10.0f64).exp()).abs() < 1e-15);
}

#[test]
fn missing_config_is_reported() {
    let out = rlcompile(&["train", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(3));
    let line = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["error"], "config_not_found");
}

#[test]
fn invalid_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    fs::write(&p, r#"{"rollouts": 1}"#).unwrap();
    let out = rlcompile(&["train", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    fs::write(&p, r#"{"qubits": 4}"#).unwrap();
    let out = rlcompile(&["train", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = small_train(&blocker.join("sub"));
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(small_train(&a).status.success());
    assert!(small_train(&b).status.success());
    for name in ["sweep.csv", "traces.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["config"]["n_qubits"], 3);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_rlcompile"))
            .args([
                "compare",
                "--seeds",
                "2",
                "--n-qubits",
                "2",
                "--iterations",
                "20",
            ])
            .args(["--rollouts", "4", "--out", out.to_str().unwrap()])
            .env("RLCOMPILE_WORKERS", workers)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out.join("sweep.csv")).unwrap()
    };
    assert_eq!(run("1", "one"), run("3", "three"));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"methods": []}"#).unwrap();
    let out = dir.path().join("out");
    let status = rlcompile(&[
        "sweep",
        "--config",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("n_qubits,depth,method,"));
}
