use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::{Days, NaiveDate};
use serde_json::Value;
use spotfou::forecast::default_params;
use spotfou::gev::GevParams;
use spotfou::hawkes::HawkesParams;
use spotfou::series::HolidayCalendar;
use spotfou::synthetic::{generate, SyntheticSeries, SyntheticSpec};
use tempfile::TempDir;

fn spotfou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spotfou"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = spotfou(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 1).unwrap()
}

fn write_prices(path: &Path, values: &[f64]) {
    let mut text = String::from("date,price\n");
    for (t, v) in values.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", start() + Days::new(t as u64)));
    }
    fs::write(path, text).unwrap();
}

fn synthetic(days: usize, seed: u64) -> SyntheticSeries {
    let mut params = default_params();
    params.jump.hawkes = HawkesParams::new(0.02, 0.0, 0.0).unwrap();
    params.jump.mark_dist = GevParams::new(60.0, 2.0, 0.2).unwrap();
    let mut spec = SyntheticSpec::new(start(), days, params, seed);
    spec.trend_amplitude = 15.0;
    for w in spec.weekly.iter_mut() {
        *w += 25.0;
    }
    generate(&spec, &HolidayCalendar::italian()).unwrap()
}

fn prices_file(dir: &TempDir, days: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(format!("prices_{days}_{seed}.csv"));
    write_prices(&path, synthetic(days, seed).series.values());
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_and_help() {
    ok(&["--version"]);
    ok(&["--help"]);
    for sub in ["simulate", "decompose", "backtest", "evaluate"] {
        ok(&[sub, "--help"]);
    }
}

#[test]
fn simulate_writes_requested_days() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    ok(&["simulate", "--h", "0.5", "--gamma", "0", "--beta", "0", "--days", "730", "--seed", "1", "--output-dir", s(&out)]);
    let (header, rows) = read_csv(&out.join("simulation.csv"));
    assert_eq!(header, ["t", "x1", "x2", "x", "intensity"]);
    assert_eq!(rows.len(), 730);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
        assert!((v[1] + v[2] - v[3]).abs() < 1e-9);
        assert!((v[4] - 0.01).abs() < 1e-12);
    }
    assert!(out.join("events.csv").exists());
    assert!(out.join("simulation.json").exists());
}

#[test]
fn simulate_is_seeded() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    ok(&["simulate", "--days", "400", "--seed", "3", "--output-dir", s(&a)]);
    ok(&["simulate", "--days", "400", "--seed", "3", "--output-dir", s(&b)]);
    ok(&["simulate", "--days", "400", "--seed", "4", "--output-dir", s(&c)]);
    let read = |p: &Path| fs::read(p.join("simulation.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn simulate_stationarity_check() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    ok(&["simulate", "--gamma", "0.3", "--beta", "0.5", "--days", "200", "--output-dir", s(&out)]);
    let bad = spotfou(&["simulate", "--gamma", "0.5", "--beta", "0.3", "--days", "200", "--output-dir", s(&out)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("NonStationary"));
}

#[test]
fn decompose_constant_series() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("flat.csv");
    write_prices(&input, &[50.0; 300]);
    let out = dir.path().join("dec");
    ok(&["decompose", "--input", s(&input), "--output-dir", s(&out)]);
    let summary = json(&out.join("decomposition.json"));
    assert_eq!(summary["jump_count"], 0);
    let table = out.join("decomposition.csv");
    assert_eq!(column(&table, "t").len(), 300);
    for v in column(&table, "f_l") {
        assert!((v - 50.0).abs() < 1e-8);
    }
    for v in column(&table, "y_f") {
        assert!(v.abs() < 1e-8);
    }
    assert_eq!(column(&out.join("trend_extension.csv"), "h").len(), 30);
}

#[test]
fn decompose_short_series_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("short.csv");
    write_prices(&input, &vec![50.0; 200]);
    let out = spotfou(&["decompose", "--input", s(&input), "--output-dir", s(&dir.path().join("dec"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InsufficientData"));
}

#[test]
fn decompose_recovers_synthetic_components() {
    let dir = TempDir::new().unwrap();
    let mut mean = [0.0; 4];
    let seeds = 5;
    for seed in 0..seeds {
        let truth = synthetic(1460, seed);
        let input = dir.path().join(format!("p{seed}.csv"));
        write_prices(&input, truth.series.values());
        let out = dir.path().join(format!("dec{seed}"));
        ok(&["decompose", "--input", s(&input), "--output-dir", s(&out)]);
        let table = out.join("decomposition.csv");
        let c = [
            corr(&column(&table, "f_s"), &truth.seasonal),
            corr(&column(&table, "f_l"), &truth.trend),
            corr(&column(&table, "y_j"), &truth.x2),
            corr(&column(&table, "y_f"), &truth.x1),
        ];
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v / seeds as f64;
        }
    }
    for (name, c) in ["f_s", "f_l", "y_j", "y_f"].iter().zip(mean) {
        assert!(c > 0.9, "{name}: mean correlation {c:.3}");
    }
}

#[test]
fn backtest_counts_determinism_and_evaluate() {
    let dir = TempDir::new().unwrap();
    let input = prices_file(&dir, 790, 1);
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "backtest", "--input", s(&input), "--horizons", "30", "--paths", "200", "--seed", "9",
            "--output-dir", s(&out),
        ]);
        out
    };
    let a = run("a");
    let b = run("b");
    let forecasts = json(&a.join("forecasts.json"));
    for variant in ["fbm", "sbm", "naive"] {
        let n = forecasts
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["variant"] == variant && r["horizon"] == 30)
            .count();
        assert_eq!(n, 2, "{variant}");
    }
    for file in ["forecasts.json", "report.json", "report.csv", "calibrations.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }

    let eval = dir.path().join("eval");
    ok(&["evaluate", "--input", s(&a.join("forecasts.json")), "--output-dir", s(&eval)]);
    assert_eq!(json(&eval.join("report.json")), json(&a.join("report.json")));
    assert_eq!(fs::read(eval.join("report.csv")).unwrap(), fs::read(a.join("report.csv")).unwrap());
}

#[test]
fn pinned_fbm_equals_sbm() {
    let dir = TempDir::new().unwrap();
    let input = prices_file(&dir, 790, 2);
    let out = dir.path().join("bt");
    ok(&[
        "backtest", "--input", s(&input), "--variant", "fbm,sbm", "--pin-hurst", "0.5", "--horizons", "1,30",
        "--paths", "200", "--output-dir", s(&out),
    ]);
    let forecasts = json(&out.join("forecasts.json"));
    let pick = |v: &str| -> Vec<Value> {
        forecasts
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["variant"] == v)
            .map(|r| r["quantiles"].clone())
            .collect()
    };
    assert!(!pick("fbm").is_empty());
    assert_eq!(pick("fbm"), pick("sbm"));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    for line in report.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1], cells[2], "{line}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let input = prices_file(&dir, 790, 3);
    let out = dir.path().join("bt");
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        format!(
            "# backtest run\ninput = {}\nvariant = naive\nhorizons = 30\npaths = 500\nseed = 11\noutput_dir = {}\n",
            s(&input),
            s(&out)
        ),
    )
    .unwrap();
    ok(&["backtest", "--config", s(&config), "--paths", "50"]);
    let cfg = json(&out.join("backtest_config.json"));
    assert_eq!(cfg["n_paths"], 50);
    assert_eq!(cfg["seed"], 11);
    assert_eq!(cfg["horizons"], serde_json::json!([30]));
    assert_eq!(cfg["variants"], serde_json::json!(["naive"]));
}

#[test]
fn bad_arguments_exit_with_parameter_code() {
    let dir = TempDir::new().unwrap();
    let input = prices_file(&dir, 790, 4);
    let out = s(dir.path()).to_string();
    for args in [
        vec!["backtest", "--input", s(&input), "--variant", "brownian", "--output-dir", &out],
        vec!["backtest", "--input", s(&input), "--horizons", "0-3", "--output-dir", &out],
        vec!["simulate", "--h", "1.5", "--output-dir", &out],
    ] {
        assert_eq!(spotfou(&args).status.code(), Some(2), "{args:?}");
    }
    let missing = spotfou(&["decompose", "--input", "/nonexistent/prices.csv", "--output-dir", &out]);
    assert_eq!(missing.status.code(), Some(3));
}
