use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn binogate(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binogate"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn design_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = binogate(&["design"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("gates").is_some(), "{v}");
}

#[test]
fn reproduce_writes_csv_plot_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = binogate(&["reproduce", "fig3a", "--fast"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["gates_effective.csv", "gates_effective.svg", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_accepts_seed_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "snr_db = 12.0\nsamples = 4\n").unwrap();
    let args = ["sweep", "awgn_samples", "--seed", "3", "--config", cfg.to_str().unwrap()];
    let out = binogate(&args, &dir.path().join("a"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(dir.path().join("a/manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(m["noise_seeds"], serde_json::json!([3, 4, 5, 6]));

    // the manifest is itself a valid config and reproduces the CSV
    let manifest_path = dir.path().join("a/manifest.json");
    let again = ["simulate", "--config", manifest_path.to_str().unwrap()];
    let out = binogate(&again, &dir.path().join("b"));
    assert_eq!(out.status.code(), Some(0));
    let a = fs::read(dir.path().join("a/awgn_samples.csv")).unwrap();
    let b = fs::read(dir.path().join("b/awgn_samples.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn regime_violation_exits_2_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("far.toml");
    fs::write(&cfg, "Delta_hz = 47.8e9\n").unwrap();
    let args = ["simulate", "--experiment", "gates_effective", "--config", cfg.to_str().unwrap()];
    assert_eq!(binogate(&args, dir.path()).status.code(), Some(2));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(binogate(&forced, dir.path()).status.code(), Some(0));
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(binogate(&["reproduce", "fig9"], dir.path()).status.code(), Some(1));
    assert_eq!(binogate(&["sweep", "fields"], dir.path()).status.code(), Some(1));
    assert_eq!(binogate(&["frobnicate"], dir.path()).status.code(), Some(1));

    let missing = dir.path().join("nope.toml");
    let out = binogate(&["design", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = binogate(&["reproduce", "phases"], &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(4));
}
