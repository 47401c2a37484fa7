use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use vineshape::calibration::ImuSample;
use vineshape::cli;
use vineshape::config::RunConfig;
use vineshape::io::{self, imu_log_csv, read_centerline};
use vineshape::math::{Quat, Vec3};
use vineshape::Error;

fn run(args: &[&str]) -> vineshape::Result<Vec<PathBuf>> {
    cli::run(std::iter::once("vineshape").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn frame(time: f64, qs: &[Quat]) -> Vec<ImuSample> {
    qs.iter().enumerate().map(|(i, &q)| ImuSample::new(time, i, q)).collect()
}

fn random_mountings(n: usize, seed: u64) -> Vec<Quat> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let axis = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), 1.0);
            Quat::from_axis_angle(axis.normalized().unwrap(), r.random_range(-0.3..0.3))
        })
        .collect()
}

#[test]
fn straight_log_reconstructs_a_straight_robot() {
    let dir = TempDir::new().unwrap();
    let ident = vec![Quat::IDENTITY; 18];
    let snap = write(dir.path(), "snap.csv", &imu_log_csv(&frame(0.0, &ident), None));
    let log = write(dir.path(), "log.csv", &imu_log_csv(&frame(30.0, &ident), Some(1)));
    let out = dir.path().join("out");
    let files = run(&["--out", out.to_str().unwrap(), "reconstruct", "--log", &log, "--snapshot", &snap]).unwrap();
    assert_eq!(files.len(), 2);
    let c = read_centerline(&out.join("centerline.csv")).unwrap();
    assert!(c.tip.position.distance(Vec3::new(173.4, 0.0, 0.0)) < 1e-9);
    assert_eq!(c.imu_indices.len(), 18);
    assert!(std::fs::read_to_string(&files[0]).unwrap().starts_with("# generated_at="));
}

#[test]
fn log_equal_to_snapshot_is_straight_whatever_the_mountings() {
    let dir = TempDir::new().unwrap();
    let mounts = random_mountings(18, 9);
    let snap = write(dir.path(), "snap.csv", &imu_log_csv(&frame(0.0, &mounts), None));
    let log = write(dir.path(), "log.csv", &imu_log_csv(&frame(10.0, &mounts), None));
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    run(&["--out", o, "--no-timestamp", "offsets", "--snapshot", &snap]).unwrap();
    let offsets = out.join("offsets.csv");
    run(&["--out", o, "--no-timestamp", "reconstruct", "--log", &log, "--offsets", offsets.to_str().unwrap()]).unwrap();
    let c = read_centerline(&out.join("centerline.csv")).unwrap();
    // Offsets go through CSV at 12 decimals.
    assert!(c.tip.position.distance(Vec3::new(173.4, 0.0, 0.0)) < 1e-6, "{:?}", c.tip.position);
}

#[test]
fn missing_imu_is_reported_with_its_line() {
    let dir = TempDir::new().unwrap();
    let ident = vec![Quat::IDENTITY; 18];
    let snap = write(dir.path(), "snap.csv", &imu_log_csv(&frame(0.0, &ident), None));
    let mut rows = frame(5.0, &ident);
    rows.remove(7);
    let log = write(dir.path(), "log.csv", &imu_log_csv(&rows, None));
    let out = dir.path().join("out");
    let err = run(&["--out", out.to_str().unwrap(), "reconstruct", "--log", &log, "--snapshot", &snap]).unwrap_err();
    match err {
        // Header on line 1, IMU 8 now on line 9.
        Error::Parse { line, message, .. } => {
            assert_eq!(line, 9, "{message}");
            assert!(message.contains("IMU 7 missing"), "{message}");
        }
        other => panic!("unexpected error {other}"),
    }
    assert!(!out.join("centerline.csv").exists());
}

#[test]
fn malformed_rows_name_their_line() {
    let text = "time_s,imu_index,qw,qx,qy,qz\n0,0,1,0,0,0\n0,1,1,0,zero,0\n";
    match io::ImuLog::parse("log.csv", text) {
        Err(Error::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("qy"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
    match io::ImuLog::parse("log.csv", "t,i,a,b,c,d\n0,0,1,0,0,0\n") {
        Err(Error::Parse { line: 1, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn clean_passive_sweep_has_no_error() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig {
        drift: vineshape::calibration::DriftModel::none(),
        mounting_std_deg: 0.0,
        ..RunConfig::default()
    };
    let cfg_path = write(dir.path(), "clean.json", &cfg.to_json());
    let out = dir.path().join("out");
    run(&["--config", &cfg_path, "--out", out.to_str().unwrap(), "--no-timestamp", "sweep", "passive"]).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("passive_summary.json")).unwrap()).unwrap();
    assert!(summary["mean_error_pct"].as_f64().unwrap() < 1e-6, "{summary}");
    let records = std::fs::read_to_string(out.join("passive_records.csv")).unwrap();
    let records = io::parse_records("passive_records.csv", &records).unwrap();
    assert_eq!(records.len(), 14);
}

#[test]
fn config_errors_name_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"passive": {"trials_per_angle": 0}}"#);
    match run(&["--config", &bad, "sweep", "passive"]) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "passive.trials_per_angle"),
        other => panic!("unexpected {other:?}"),
    }
    let typo = write(dir.path(), "typo.json", r#"{"seeed": 1}"#);
    assert!(matches!(run(&["--config", &typo, "sweep", "drift"]), Err(Error::Config { field, .. }) if field == "seeed"));
    assert!(matches!(run(&["sweep", "sideways"]), Err(Error::Config { .. })));
}

#[test]
fn spacing_sweep_reanalyses_saved_logs() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig {
        spacing: vineshape::experiments::SpacingSweep {
            trials: 6,
            ..Default::default()
        },
        ..RunConfig::default()
    };
    let cfg_path = write(dir.path(), "small.json", &cfg.to_json());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&["--config", &cfg_path, "--out", a.to_str().unwrap(), "--no-timestamp", "sweep", "spacing"]).unwrap();
    let logs = a.join("spacing_trials.json");
    run(&[
        "--config",
        &cfg_path,
        "--out",
        b.to_str().unwrap(),
        "--no-timestamp",
        "sweep",
        "spacing",
        "--logs",
        logs.to_str().unwrap(),
    ])
    .unwrap();
    for f in ["spacing_records.csv", "spacing_summary.json", "spacing.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert!(!b.join("spacing_trials.json").exists());
}

#[test]
fn plots_from_written_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    run(&["--out", o, "--no-timestamp", "sweep", "length"]).unwrap();
    run(&["--out", o, "--no-timestamp", "sweep", "drift"]).unwrap();
    let rec = out.join("length_records.csv");
    let drift = out.join("drift_traces.csv");
    run(&["--out", o, "--no-timestamp", "plot", "error-scatter-with-fit", "--input", rec.to_str().unwrap(), "--name", "s.svg"])
        .unwrap();
    run(&["--out", o, "--no-timestamp", "plot", "drift-traces", "--input", drift.to_str().unwrap(), "--name", "d.svg"]).unwrap();
    let s = std::fs::read_to_string(out.join("s.svg")).unwrap();
    assert!(s.contains("<circle") && s.contains("least-squares fit"));
    let d = std::fs::read_to_string(out.join("d.svg")).unwrap();
    assert_eq!(d.matches("<polyline").count(), RunConfig::default().drift_experiment.n_sensors);
    // A drift CSV is not a centerline.
    assert!(run(&["--out", o, "plot", "centerline-overlay", "--input", drift.to_str().unwrap()]).is_err());
}
