//! End-to-end runs of the `spinbath` binary.

use std::path::Path;
use std::process::{Command, Output};

use spinbath_core::cli::{read_csv, SEED_ENV};
use spinbath_core::experiments::fit_decoherence_time;

fn spinbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(args)
        .env_remove(SEED_ENV)
        .output()
        .expect("run spinbath")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(spinbath(&["figure"]).status.code(), Some(2));
    assert_eq!(spinbath(&["simulate", "--g", "400", "--g-max", "800", "--t0", "1e-3"]).status.code(), Some(2));
    assert_eq!(spinbath(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(spinbath(&["figure", "--id", "6"]).status.code(), Some(1));
    assert_eq!(spinbath(&["simulate", "--t0=-1"]).status.code(), Some(1));
    let missing = spinbath(&["fit", "--input", "/nonexistent/series.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/series.csv"));
}

#[test]
fn oracle_check_reports_and_caps() {
    let ok = spinbath(&["oracle-check", "--max-m", "2", "--max-n", "3", "--seeds", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // M = 1 runs four variants, M = 2 the two generalized ones.
    assert_eq!(rows.len(), 3 * 5 * 4 + 3 * 5 * 2);
    for row in rows {
        let dev: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(dev < 1e-10, "{row}");
    }
    let single = spinbath(&["oracle-check", "--max-m", "1", "--max-n", "1", "--seeds", "1"]);
    assert_eq!(stdout(&single).lines().filter(|l| !l.starts_with('#')).count(), 1 + 4);
    assert_eq!(spinbath(&["oracle-check", "--max-m", "20", "--max-n", "20"]).status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# desk run\nt0 = 3e-6\nn = 2000\nseed = 9\n").unwrap();
    let out = spinbath(&["simulate", "--config", p(&conf), "--t0", "1e-6", "--points", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("# t0 = 0.000001") || text.contains("# t0 = 1e-6"), "{text}");
    assert!(text.contains("# seed = 9"));
    assert!(text.contains("# n = [2000]"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 11);

    std::fs::write(&conf, "t0 = 3e-6\nwhatever = 1\n").unwrap();
    let bad = spinbath(&["simulate", "--config", p(&conf)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains(":2:"));
}

#[test]
fn seed_environment_variable_is_a_default() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinbath"));
        cmd.args(["simulate", "--t0", "1e-3", "--points", "5", "--n", "50"]).env_remove(SEED_ENV);
        if let Some(v) = env {
            cmd.env(SEED_ENV, v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        stdout(&cmd.output().unwrap())
    };
    assert!(run(Some("77"), None).contains("# seed = 77"));
    assert!(run(Some("77"), Some("5")).contains("# seed = 5"));
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
}

#[test]
fn echoed_config_reproduces_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let out = spinbath(&[
        "simulate", "--m", "10", "--n", "300", "--decomposition", "general-d2", "--t0", "2e-3", "--points", "40",
        "--seed", "3", "--out", p(&first),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&first).unwrap();
    let conf: String = text
        .lines()
        .skip(1)
        .take_while(|l| l.starts_with("# "))
        .map(|l| format!("{}\n", &l[2..]))
        .filter(|l| !l.starts_with("out "))
        .collect();
    let conf_path = dir.path().join("echo.conf");
    std::fs::write(&conf_path, conf).unwrap();
    let second = dir.path().join("b.csv");
    let out = spinbath(&["simulate", "--config", p(&conf_path), "--out", p(&second)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&second).unwrap(), text);
}

#[test]
fn fit_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("r2.csv");
    let out = spinbath(&[
        "simulate", "--n", "100000", "--t0", "2e-5", "--points", "200", "--seed", "4", "--out", p(&series),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let fitted = spinbath(&["fit", "--input", p(&series)]);
    assert_eq!(fitted.status.code(), Some(0), "{}", String::from_utf8_lossy(&fitted.stderr));
    let text = stdout(&fitted);
    let row = text.lines().find(|l| l.starts_with("r2,")).expect("fit row");
    let tau_cli: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    let tau_lib = fit_decoherence_time(&read_csv(&series).unwrap()[0]).unwrap().tau;
    assert!(((tau_cli - tau_lib) / tau_lib).abs() <= 1e-12);
}

#[test]
fn figure_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let svg = dir.path().join("fig2.svg");
    let out = spinbath(&[
        "figure", "--id", "2", "--seed", "42", "--base-exponent", "5", "--out", p(&csv), "--svg", p(&svg), "--log-y",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "t,N=1e7,N=1e8,N=1e9");
    assert_eq!(data.len(), 202);
    assert!(data.iter().all(|l| l.split(',').count() == 4));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn sweep_table() {
    let out = spinbath(&["sweep", "--m", "10", "--n", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("10,1000,decoheres,persists,")), "{text}");
}
