mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaugewave::cli::frame_file::read_frame;
use gaugewave::cli::io::{RunRecord, SolutionDocument};
use serde_json::Value;
use tempfile::TempDir;

fn gaugewave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaugewave")).args(args).env_remove("GAUGEWAVE_THREADS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// `σ²` of the shooting ground state at `ω0 = 0.8`, `m0 = s0 = 1`.
fn oracle_sigma2() -> f64 {
    common::ShootingOracle::saturable(0.8, 1.0, 1.0).integrals(1.0, 50.0).0
}

fn solve_into(dir: &TempDir, name: &str, q: f64) -> PathBuf {
    let out = dir.path().join(name);
    let run = gaugewave(&["solve", "--q", &q.to_string(), "--sigma2", "102.13", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    out
}

#[test]
fn solve_matches_the_shooting_oracle_and_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.json");
    let sigma2 = oracle_sigma2();
    let run = gaugewave(&["solve", "--q", "0", "--sigma2", &format!("{sigma2}"), "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(run.stderr.is_empty(), "stderr on success: {}", stderr(&run));

    let record: RunRecord = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.run.json")).unwrap()).unwrap();
    let summary = record.solution_summary.as_ref().unwrap();
    assert!((summary.omega2 - 0.64).abs() < 1e-3, "omega2 {}", summary.omega2);
    assert_eq!(record.config_echo.sigma2, sigma2);
    assert_eq!(record.tool_version, env!("CARGO_PKG_VERSION"));
    assert!(record.artifact_paths.iter().all(|a| a.exists()), "{:?}", record.artifact_paths);
    assert!(record.check_results.values().all(|&ok| ok));

    // the record covers the full checklist
    let doc = SolutionDocument::load(&out).unwrap();
    let (sol, _) = doc.verify().unwrap();
    let keys: Vec<&String> = sol.diagnostics.checks.keys().collect();
    assert_eq!(keys, record.check_results.keys().collect::<Vec<_>>());

    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("r,u,phi,energy_density\n"));
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), doc.grid.n_points + 1);
}

#[test]
fn solution_documents_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let out = solve_into(&dir, "a.json", 0.05);
    let original = std::fs::read(&out).unwrap();
    let again = dir.path().join("b.json");
    SolutionDocument::load(&out).unwrap().save(&again).unwrap();
    assert_eq!(original, std::fs::read(&again).unwrap());
    let text = String::from_utf8(original).unwrap();
    let keys: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn validate_accepts_fresh_and_rejects_damaged_files() {
    let dir = TempDir::new().unwrap();
    let out = solve_into(&dir, "s.json", 0.1);
    let ok = gaugewave(&["validate", "--in", p(&out)]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("static_residual"));

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for v in doc["u"].as_array_mut().unwrap() {
        *v = Value::from(v.as_f64().unwrap() * 1.1);
    }
    let damaged = dir.path().join("damaged.json");
    std::fs::write(&damaged, serde_json::to_string(&doc).unwrap()).unwrap();
    let bad = gaugewave(&["validate", "--in", p(&damaged)]);
    assert_ne!(code(&bad), 0);
    assert!(stderr(&bad).contains("static_residual"), "{}", stderr(&bad));

    let text = std::fs::read_to_string(&out).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    let cut = gaugewave(&["validate", "--in", p(&truncated)]);
    assert_eq!(code(&cut), 1);
    assert!(stderr(&cut).contains("parse error"));
}

#[test]
fn usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(code(&gaugewave(&["solve", "--q", "0", "--out", p(&out)])), 64);
    assert_eq!(code(&gaugewave(&["solve", "--q", "zero", "--sigma2", "1", "--out", p(&out)])), 64);
    assert_eq!(code(&gaugewave(&["solve", "--q", "0", "--sigma2", "-1", "--out", p(&out)])), 64);
    assert_eq!(code(&gaugewave(&["frobnicate"])), 64);
    assert_eq!(code(&gaugewave(&[])), 64);
    let help = gaugewave(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("sweep-q"));
}

#[test]
fn quadratic_w_is_refused_or_finds_no_bound_state() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("q.json");
    let refused = gaugewave(&["solve", "--q", "0.05", "--sigma2", "1.0", "--w", "quadratic", "--out", p(&out)]);
    assert_eq!(code(&refused), 3);
    assert!(stderr(&refused).contains("W3 W <= m1^2 s^2/2 + c    FAIL"));
    let forced = gaugewave(&[
        "solve", "--q", "0.05", "--sigma2", "1.0", "--w", "quadratic", "--skip-w-check", "--out", p(&out),
    ]);
    assert_eq!(code(&forced), 2, "{}", stderr(&forced));
    assert!(!out.exists());
}

#[test]
fn config_file_supplies_defaults_and_is_echoed() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "schema_version = 1\n[solver]\nn_points = 1200\nr_max = 40.0\n[model]\nm0 = 1.0\ns0 = 1.0\n")
        .unwrap();
    let out = dir.path().join("c.json");
    let run = gaugewave(&["solve", "--q", "0.05", "--sigma2", "80", "--config", p(&config), "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let record: RunRecord = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.run.json")).unwrap()).unwrap();
    assert_eq!(record.config_echo.n_points, 1200);
    assert_eq!(record.config_echo.r_max, 40.0);
    assert_eq!(record.config_echo.q, 0.05);

    std::fs::write(&config, "[solver]\nn_pointz = 3\n").unwrap();
    assert_eq!(code(&gaugewave(&["solve", "--q", "0", "--sigma2", "1", "--config", p(&config), "--out", p(&out)])), 1);
}

#[test]
fn boost_reports_residuals_and_refinement_orders() {
    let dir = TempDir::new().unwrap();
    let sol = solve_into(&dir, "s.json", 0.1);
    let frame = dir.path().join("f0.bin");
    let still = gaugewave(&["boost", "--in", p(&sol), "--v", "0", "--grid", "32", "--halfwidth", "12", "--out", p(&frame)]);
    assert_eq!(code(&still), 0, "{}", stderr(&still));
    assert!(stdout(&still).contains("gauss"));
    let (meta, chunks) = read_frame(&frame).unwrap();
    assert_eq!(meta.grid.n_per_axis, 32);
    assert_eq!(chunks.len(), meta.chunks.len());
    assert!(chunks.iter().all(|(_, v)| v.len() == 32 * 32 * 32));
    let header = std::fs::read(&frame).unwrap();
    assert!(header.starts_with(b"GAUGEWAVE-FRAME 1\n"));

    let rejected = gaugewave(&["boost", "--in", p(&sol), "--v", "1.0", "--grid", "32", "--halfwidth", "12", "--out", p(&frame)]);
    assert_eq!(code(&rejected), 64);

    let moving = dir.path().join("f5.bin");
    let refined = gaugewave(&[
        "boost", "--in", p(&sol), "--v", "0.5", "--grid", "48", "--halfwidth", "12", "--out", p(&moving), "--refine",
    ]);
    assert_eq!(code(&refined), 0, "{}", stderr(&refined));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("f5.residuals.json")).unwrap()).unwrap();
    let orders = report["refinement"]["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 5);
    for o in orders {
        if let Some(p) = o["order"].as_f64() {
            assert!(p >= 1.8, "{o}");
        }
    }
}

#[test]
fn sweep_shows_a_quadratic_shift_in_omega2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let run = gaugewave(&["sweep-q", "--qmin", "0", "--qmax", "0.1", "--steps", "5", "--sigma2", "102.13", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,omega2,J,residual,converged"));
    let rows: Vec<(f64, f64, bool)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[4] == "true")
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.2));
    assert!(rows.windows(2).all(|w| w[1].1 > w[0].1), "omega2 not increasing in q");
    let base = rows[0].1;
    let q2: Vec<f64> = rows.iter().map(|r| r.0 * r.0).collect();
    let shift: Vec<f64> = rows.iter().map(|r| r.1 - base).collect();
    let (_, _, r2) = common::linear_fit(&q2, &shift);
    assert!(r2 >= 0.95, "R^2 = {r2}");
    assert!(shift[4] < 0.1 * base);
    let svg = std::fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let record: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.run.json")).unwrap()).unwrap();
    assert_eq!(record["largest_converged_q"].as_f64(), Some(rows[4].0));
}

#[test]
fn sweep_range_edge_cases() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("one.csv");
    let empty = gaugewave(&["sweep-q", "--qmin", "0.2", "--qmax", "0.1", "--steps", "3", "--sigma2", "50", "--out", p(&out)]);
    assert_eq!(code(&empty), 64);
    let single = gaugewave(&[
        "sweep-q", "--qmin", "0.05", "--qmax", "0.05", "--steps", "1", "--sigma2", "80", "--n-points", "1000", "--r-max",
        "40", "--out", p(&out),
    ]);
    assert_eq!(code(&single), 0, "{}", stderr(&single));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn check_w_reports_assumptions() {
    let ok = gaugewave(&["check-w", "--family", "saturable", "--m0", "1", "--s0", "1"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let text = stdout(&ok);
    assert!(text.contains("frequency window (0.0"));
    assert!(!text.contains("FAIL"));

    let quad = gaugewave(&["check-w", "--family", "quadratic"]);
    assert_eq!(code(&quad), 3);
    assert!(stderr(&quad).contains("W3"));

    let dir = TempDir::new().unwrap();
    let table = dir.path().join("w.csv");
    std::fs::write(&table, "s,W\n0,0\n0.5,oops\n").unwrap();
    assert_eq!(code(&gaugewave(&["check-w", "--table", p(&table)])), 1);
    assert_eq!(code(&gaugewave(&["check-w", "--family", "tabulated"])), 64);

    let good = dir.path().join("sat.csv");
    let rows: String = (0..=400).map(|k| {
        let s = k as f64 * 0.05;
        format!("{s},{}\n", common::saturable_w(s, 1.0, 1.0))
    }).collect();
    std::fs::write(&good, format!("s,W\n{rows}")).unwrap();
    let tab = gaugewave(&["check-w", "--table", p(&good)]);
    assert_eq!(code(&tab), 0, "{}{}", stdout(&tab), stderr(&tab));
}

#[test]
fn plot_renders_profiles_and_sweeps() {
    let dir = TempDir::new().unwrap();
    let sol = solve_into(&dir, "s.json", 0.0);
    let svg = dir.path().join("profile.svg");
    assert_eq!(code(&gaugewave(&["plot", "--in", p(&sol), "--out", p(&svg)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 2);

    let csv = dir.path().join("s.csv");
    let sweep = dir.path().join("fake.csv");
    std::fs::write(&sweep, "q,omega2,J,residual,converged\n0,0.64,85,1e-9,true\n0.1,0.70,89,1e-9,true\n").unwrap();
    assert_eq!(code(&gaugewave(&["plot", "--in", p(&sweep), "--out", p(&svg)])), 0);
    // a profile CSV is not a sweep table
    assert_eq!(code(&gaugewave(&["plot", "--in", p(&csv), "--out", p(&svg)])), 1);
    assert_eq!(code(&gaugewave(&["plot", "--in", p(&dir.path().join("missing.json")), "--out", p(&svg)])), 1);
}

#[test]
fn thread_count_is_validated() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.csv");
    let args = ["sweep-q", "--qmin", "0", "--qmax", "0.05", "--steps", "2", "--sigma2", "60", "--n-points", "800", "--r-max", "40", "--out", p(&out)];
    let bad = Command::new(env!("CARGO_BIN_EXE_gaugewave")).args(args).env("GAUGEWAVE_THREADS", "zero").output().unwrap();
    assert_eq!(code(&bad), 64);
    let one = Command::new(env!("CARGO_BIN_EXE_gaugewave")).args(args).env("GAUGEWAVE_THREADS", "1").output().unwrap();
    assert_eq!(code(&one), 0, "{}", stderr(&one));
    let two = Command::new(env!("CARGO_BIN_EXE_gaugewave")).args(args).env("GAUGEWAVE_THREADS", "2").output().unwrap();
    assert_eq!(one.stdout, two.stdout);
}
