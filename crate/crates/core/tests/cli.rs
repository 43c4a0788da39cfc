use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crflow::commands::parse_lambda_grid;
use crflow::io::{read_snapshot, TIMESERIES_COLUMNS};

fn crflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_S2: &str = "[geometry]\nm = 1\nN = 8\n[target]\nkind = sphere\nn = 2\n";

#[test]
fn constant_map_converges_with_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!("{SMALL_S2}[initial]\nfamily = constant\n"),
    );
    let out = tmp.path().join("out");
    let o = crflow(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in [
        "timeseries.csv",
        "initial.snap",
        "final.snap",
        "summary.txt",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("termination = CONVERGED"));
}

#[test]
fn short_horizon_times_out_with_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!("{SMALL_S2}[flow]\nt_max = 0.001\ncadence = 3\n[initial]\nfamily = torus_mode\nlambda = 0.5\n"),
    );
    let out = tmp.path().join("out");
    let o = crflow(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let csv = fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, TIMESERIES_COLUMNS.join(","));
    assert!(csv.lines().next().unwrap().starts_with('#'));
    let last = csv.lines().last().unwrap();
    assert_eq!(last.split(',').count(), header.split(',').count());

    let snap = fs::read(out.join("final.snap")).unwrap();
    assert!(snap.starts_with(b"CRFLOW1 1 8 3 "));
    let s = read_snapshot(snap.as_slice()).unwrap();
    assert_eq!((s.m, s.resolution, s.field.n_amb), (1, 8, 3));
    assert!((s.t - 0.001).abs() < 1e-15);
}

#[test]
fn density_threshold_blows_up_with_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!(
            "{SMALL_S2}[flow]\nrho_max = 1e-3\n[initial]\nfamily = torus_mode\nlambda = 0.5\n"
        ),
    );
    let out = tmp.path().join("out");
    let o = crflow(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("termination = BLOWUP"));
}

#[test]
fn errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.ini");
    let o = crflow(&["run", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let cfg = write_config(tmp.path(), &format!("{SMALL_S2}[flow]\nspeed = 3\n"));
    let o = crflow(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));

    let o = crflow(&["sweep", "--config", &cfg, "--lambda", "1:0:3"]);
    assert_eq!(o.status.code(), Some(1));

    let o = crflow(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = crflow(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sweep_writes_one_directory_per_lambda() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!("{SMALL_S2}[flow]\nt_max = 0.002\n[initial]\nfamily = torus_mode\n"),
    );
    let out = tmp.path().join("sweep");
    let o = crflow(&[
        "sweep",
        "--config",
        &cfg,
        "--lambda",
        "0.1:0.3:3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for i in 0..3 {
        assert!(out.join(format!("lambda_{i}/timeseries.csv")).exists());
    }
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(rows.lines().filter(|l| l.contains("TIMEOUT")).count(), 3);
    assert!(out.join("sweep_summary.txt").exists());
}

#[test]
fn oracle_reports_the_decay_factor() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[geometry]\nm = 1\nN = 8\n[target]\nkind = torus\nn = 1\n[initial]\nfamily = torus_mode\nlambda = 1\n",
    );
    let o = crflow(&["oracle", "--config", &cfg, "--t", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    let decay: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("amplitude_factor = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((decay - (-0.02 * std::f64::consts::PI.powi(2)).exp()).abs() < 1e-15);
}

#[test]
fn quick_check_passes() {
    let o = crflow(&["check", "--level", "quick"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert!(!String::from_utf8_lossy(&o.stdout).contains("[FAIL]"));
}

#[test]
fn lambda_grids() {
    let grid = parse_lambda_grid("0.1:1.7:5").unwrap();
    assert_eq!((grid[0], grid[4]), (0.1, 1.7));
    for (got, want) in grid.iter().zip([0.1, 0.5, 0.9, 1.3, 1.7]) {
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }
    assert_eq!(parse_lambda_grid("2:2:1").unwrap(), vec![2.0]);
    for bad in ["1:0:3", "0:1:0", "0:1", "a:1:2", "0:1:1"] {
        assert!(parse_lambda_grid(bad).is_err(), "{bad}");
    }
}
