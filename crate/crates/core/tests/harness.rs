use std::fs;
use std::path::Path;

use binogate::error::{Error, EXIT_CONVERGENCE, EXIT_IO, EXIT_REGIME};
use binogate::xp::{read_csv, run_experiment, ExperimentConfig, ExperimentKind, Overrides};

fn fast(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(
        "",
        &Overrides {
            experiment: Some(kind),
            fast: true,
            ..Overrides::default()
        },
    )
    .unwrap()
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn seeded_runs_write_identical_csvs() {
    let cfg = fast(ExperimentKind::AwgnSamples);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&cfg).unwrap().write(a.path()).unwrap();
    run_experiment(&cfg).unwrap().write(b.path()).unwrap();
    let (ca, cb) = (csv_bytes(a.path()), csv_bytes(b.path()));
    assert_eq!(ca.len(), 1);
    assert_eq!(ca, cb);
}

#[test]
fn manifest_reload_reproduces_csvs() {
    let mut cfg = fast(ExperimentKind::Systematic);
    cfg.seed = 7;
    let first = tempfile::tempdir().unwrap();
    let res = run_experiment(&cfg).unwrap();
    res.write(first.path()).unwrap();

    let reloaded = ExperimentConfig::load(&first.path().join("manifest.json"), &Overrides::default()).unwrap();
    assert_eq!(reloaded, cfg);
    let second = tempfile::tempdir().unwrap();
    let again = run_experiment(&reloaded).unwrap();
    again.write(second.path()).unwrap();
    assert_eq!(csv_bytes(first.path()), csv_bytes(second.path()));
    assert_eq!(res.manifest, again.manifest);
}

#[test]
fn manifest_echoes_run_metadata() {
    let res = run_experiment(&fast(ExperimentKind::AwgnSamples)).unwrap();
    let m = &res.manifest;
    assert_eq!(m.noise_seeds, (0..10).collect::<Vec<u64>>());
    assert_eq!(m.frame_periods, Some(-60));
    assert!(m.regime.pass);
    assert!(m.convergence.step_halving_delta.is_some());
    assert_eq!(m.outputs, ["awgn_samples.csv", "awgn_samples.svg"]);
}

#[test]
fn out_of_regime_parameters_are_refused() {
    let ov = Overrides {
        experiment: Some(ExperimentKind::GatesEffective),
        ..Overrides::default()
    };
    let cfg = ExperimentConfig::from_toml_str("Delta_hz = 47.8e9", &ov).unwrap();
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, Error::Regime(_)), "{err}");
    assert_eq!(err.exit_code(), EXIT_REGIME);

    let forced = ExperimentConfig {
        force: true,
        ..cfg
    };
    let res = run_experiment(&forced).unwrap();
    assert!(!res.manifest.regime.pass);
}

#[test]
fn convergence_miss_is_reported_with_outputs() {
    let mut res = run_experiment(&fast(ExperimentKind::GatesEffective)).unwrap();
    assert!(res.status().is_ok());
    res.manifest.convergence.step_halving_delta = Some(10.0 * res.manifest.convergence.tolerance);
    let err = res.status().unwrap_err();
    assert_eq!(err.exit_code(), EXIT_CONVERGENCE);
    let dir = tempfile::tempdir().unwrap();
    res.write(dir.path()).unwrap();
    assert!(dir.path().join("gates_effective.csv").exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let res = run_experiment(&fast(ExperimentKind::Phases)).unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    let err = res.write(&file.path().join("sub")).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_IO);
}

#[test]
fn path_export_schema() {
    let res = run_experiment(&fast(ExperimentKind::Fields)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    res.write(dir.path()).unwrap();
    let t = read_csv(&dir.path().join("fields.csv")).unwrap();
    assert_eq!(
        t.columns(),
        ["t_us", "gamma1_rad", "gamma2_rad", "omega_x_rad_per_s", "omega_y_rad_per_s"]
    );
    assert_eq!(t.len(), 4001);
    let time = t.column("t_us").unwrap();
    assert_eq!((time[0], time[4000]), (0.0, 5.0));
    // γ₁ = π sin²(πt/T) peaks at π in the middle
    let g1 = t.column("gamma1_rad").unwrap();
    assert!((g1[2000] - std::f64::consts::PI).abs() < 1e-11);
    assert!(dir.path().join("fields.svg").exists());
}

#[test]
fn sweep_schemas() {
    let res = run_experiment(&fast(ExperimentKind::Systematic)).unwrap();
    let t = res.output("systematic").unwrap();
    assert_eq!(t.len(), 11);
    assert_eq!(t.columns()[0], "epsilon");
    assert!(t.columns().iter().any(|c| c == "F_avg_not"));
    assert!(t.columns().iter().any(|c| c == "F_ref_not"));

    let res = run_experiment(&fast(ExperimentKind::AwgnSweep)).unwrap();
    let t = res.output("awgn_sweep").unwrap();
    assert_eq!(t.columns(), ["snr_db", "F_mean", "F_std"]);
    assert_eq!(t.column("snr_db").unwrap(), (5..=20).map(f64::from).collect::<Vec<_>>());
    assert!(res.output("awgn_fit").is_some());
}
