//! End-to-end runs of the `fockladder` binary on small scenario files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockladder")).args(args).output().expect("binary runs")
}

fn scenario(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// Runs a command with `--format json` and returns the parsed report.
fn json_report(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn column(report: &Value, table: usize, name: &str) -> Vec<Value> {
    let t = &report["tables"][table];
    let idx = t["columns"].as_array().unwrap().iter().position(|c| c["name"] == name).unwrap_or_else(|| panic!("no column {name}"));
    t["rows"].as_array().unwrap().iter().map(|r| r[idx].clone()).collect()
}

fn floats(v: Vec<Value>) -> Vec<f64> {
    v.into_iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn identical_runs_give_identical_bytes() {
    let cfg = examples().join("hermite_propagate.toml");
    let args = ["propagate", "-c", cfg.to_str().unwrap(), "--oracle"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_has_units_pictures_and_crlf() {
    let cfg = examples().join("hermite_propagate.toml");
    let out = run(&["propagate", "-c", cfg.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.split("\r\n").next().unwrap();
    assert!(header.starts_with("t [time],re_sigma_0_0 [amplitude; interaction picture]"), "{header}");
    assert_eq!(text.matches("\r\n").count(), 14);
    let first_row: Vec<&str> = text.split("\r\n").nth(1).unwrap().split(',').collect();
    assert_eq!(first_row[0], "0.0000000000000000e0");
}

#[test]
fn propagator_is_the_identity_at_time_zero() {
    let cfg = examples().join("hermite_propagate.toml");
    let r = json_report(&["propagate", "-c", cfg.to_str().unwrap()]);
    for (m, n) in [(0, 0), (1, 0), (2, 3)] {
        let re = floats(column(&r, 0, &format!("re_sigma_{m}_{n}")));
        let im = floats(column(&r, 0, &format!("im_sigma_{m}_{n}")));
        assert_eq!(re[0], if m == n { 1.0 } else { 0.0 });
        assert_eq!(im[0], 0.0);
    }
    assert_eq!(r["checks"][0]["passed"], true);
}

#[test]
fn propagator_oracle_check_passes() {
    let cfg = examples().join("hermite_propagate.toml");
    let r = json_report(&["propagate", "-c", cfg.to_str().unwrap(), "--oracle"]);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["passed"] == true), "{checks:?}");
}

#[test]
fn complex_time_outside_the_strip_is_an_error() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(
        &dir,
        "strip.toml",
        "schema_version = 1\n[family]\nkind = \"laguerre\"\nmu = 1.0\n[time]\nt0 = 0\nt1 = 1\nsteps = 2\n[propagate]\nimag = 3.0\n",
    );
    let out = run(&["propagate", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "library");

    // Inside the doubled strip 2r < y < 2s = 2 the value is finite.
    let cfg = scenario(
        &dir,
        "inside.toml",
        "schema_version = 1\n[family]\nkind = \"laguerre\"\nmu = 1.0\n[time]\nt0 = 0\nt1 = 1\nsteps = 2\n[propagate]\nimag = -0.5\n",
    );
    let r = json_report(&["propagate", "-c", &cfg]);
    // σ̂₀₀(−0.5i) = ⟨e^{−ω/2}⟩ = 1/(1 + 1/2) for the unit exponential.
    let re = floats(column(&r, 0, "re_sigma_0_0"));
    assert!((re[0] - 2.0 / 3.0).abs() < 1e-14, "{}", re[0]);
}

#[test]
fn hermite_moments_are_gaussian() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "h.toml", "schema_version = 1\n[family]\nkind = \"hermite\"\n[spectrum]\nmoments = 4\n");
    let r = json_report(&["spectrum", "-c", &cfg, "--oracle"]);
    let mu = floats(column(&r, 1, "mu_k"));
    for (got, want) in mu.iter().zip([1.0, 0.0, 0.5, 0.0, 0.75]) {
        assert!((got - want).abs() < 1e-13, "{mu:?}");
    }
    assert_eq!(r["checks"][0]["passed"], true);
    let rho = floats(column(&r, 0, "rho"));
    assert_eq!(rho.len(), 201);
    // The default window is centred on the mean: the middle point is the peak.
    assert!((rho[100] - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
}

#[test]
fn laguerre_moments_are_factorials() {
    let cfg = examples().join("laguerre_spectrum.toml");
    let r = json_report(&["spectrum", "-c", cfg.to_str().unwrap(), "--oracle"]);
    let mu = floats(column(&r, 1, "mu_k"));
    let mut fact = 1.0;
    for (k, m) in mu.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        assert!((m - fact).abs() < 1e-12 * fact, "k={k}: {m}");
    }
}

#[test]
fn jacobi_density_vanishes_outside_the_support() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(
        &dir,
        "j.toml",
        "schema_version = 1\n[family]\nkind = \"jacobi\"\na = -1.0\nb = 1.0\nmu = 2.0\nnu = 3.0\n[spectrum]\nlo = -2.0\nhi = 2.0\npoints = 9\n",
    );
    let r = json_report(&["spectrum", "-c", &cfg]);
    let w = floats(column(&r, 0, "omega"));
    let rho = floats(column(&r, 0, "rho"));
    for (w, rho) in w.iter().zip(&rho) {
        if w.abs() > 1.0 {
            assert_eq!(*rho, 0.0, "omega={w}");
        } else if w.abs() < 1.0 {
            assert!(*rho > 0.0, "omega={w}");
        }
    }
}

#[test]
fn amplifier_starts_at_the_coherent_occupation() {
    let cfg = examples().join("amplifier.toml");
    let r = json_report(&["amplifier", "-c", cfg.to_str().unwrap()]);
    let closed = floats(column(&r, 0, "n0_closed"));
    let oracle = floats(column(&r, 0, "n0_oracle"));
    let want = 0.4f64 * 0.4 + 0.1 * 0.1;
    assert!((closed[0] - want).abs() < 1e-14);
    assert!((oracle[0] - want).abs() < 1e-12);
    assert_eq!(r["checks"][0]["passed"], true);
    // Amplification: the occupation grows with time.
    assert!(closed.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn reduce_finds_laguerre_sectors_of_the_amplifier() {
    let cfg = examples().join("amplifier_reduce.toml");
    let r = json_report(&["reduce", "-c", cfg.to_str().unwrap(), "--oracle"]);
    let pv = column(&r, 0, "pseudo_vacuum");
    let class = column(&r, 0, "class");
    let dim = column(&r, 0, "dim");
    for ((pv, class), dim) in pv.iter().zip(&class).zip(&dim) {
        let occ: Vec<usize> = serde_json::from_str(pv.as_str().unwrap()).unwrap();
        // One of the two modes is empty at the pseudo-vacuum; μ = δ + 1 with δ the other occupation.
        assert!(occ.contains(&0), "{occ:?}");
        let delta = occ[0].abs_diff(occ[1]) as f64;
        let text = class.as_str().unwrap();
        assert!(text.starts_with("Laguerre-type"), "{text}");
        let mu: f64 = text.split("μ = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert!((mu - (delta + 1.0)).abs() < 1e-9, "{text}");
        assert_eq!(dim, "inf");
    }
    assert_eq!(r["checks"][0]["passed"], true);
}

#[test]
fn alpha_mean_of_a_number_state_grows_linearly() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(
        &dir,
        "a.toml",
        "schema_version = 1\n[family]\nkind = \"laguerre\"\nmu = 1.5\n[state]\nkind = \"number\"\nn = 3\n\
         [time]\nt0 = -1\nt1 = 2\nsteps = 7\n[expect]\nobservables = [\"alpha:1\", \"number:1\"]\n",
    );
    let r = json_report(&["expect", "-c", &cfg, "--oracle"]);
    let t = floats(column(&r, 0, "t"));
    let re = floats(column(&r, 0, "re_alpha^1"));
    let im = floats(column(&r, 0, "im_alpha^1"));
    for i in 0..t.len() {
        assert!((re[i] - t[i]).abs() < 1e-10 && im[i].abs() < 1e-10, "t={}: {} {}", t[i], re[i], im[i]);
    }
    assert_eq!(r["checks"][0]["passed"], true);
}

#[test]
fn expect_oracle_agrees_in_the_full_picture() {
    let cfg = examples().join("laguerre_expect.toml");
    let r = json_report(&["expect", "-c", cfg.to_str().unwrap(), "--oracle"]);
    assert_eq!(r["checks"][0]["passed"], true, "{}", r["checks"]);
    assert_eq!(r["tables"][0]["columns"][1]["picture"], "full");
}

#[test]
fn alpha_in_the_full_picture_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(
        &dir,
        "a.toml",
        "schema_version = 1\n[family]\nkind = \"hermite\"\n[state]\nkind = \"number\"\nn = 1\n\
         [time]\nt0 = 0\nt1 = 1\nsteps = 2\n[expect]\npicture = \"full\"\nobservables = [\"alpha:1\"]\n",
    );
    let out = run(&["expect", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "unsupported");
}

#[test]
fn failed_tolerance_exits_with_two_and_a_json_report() {
    let cfg = examples().join("amplifier.toml");
    let out = run(&["amplifier", "-c", cfg.to_str().unwrap(), "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["status"], "tolerance_failed");
    assert_eq!(err["failed_checks"][0]["passed"], false);
    // The table itself is still written.
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("t [time]"));
}

#[test]
fn unknown_keys_are_reported_with_their_line() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario(&dir, "bad.toml", "schema_version = 1\n[time]\nt0 = 0\nt1 = 1\nstepz = 3\n");
    let out = run(&["propagate", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    let msg = err["error"]["message"].as_str().unwrap();
    assert!(msg.contains("line 5") && msg.contains("stepz"), "{msg}");
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn file_output_splits_tables_and_writes_gnuplot_scripts() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("reduce.csv");
    let cfg = examples().join("amplifier_reduce.toml");
    let out = run(&["reduce", "-c", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap(), "--gnuplot"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    for name in ["reduce.csv", "reduce.gp", "reduce.ladder.csv", "reduce.ladder.gp"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let script = std::fs::read_to_string(dir.path().join("reduce.ladder.gp")).unwrap();
    assert!(script.contains("'reduce.ladder.csv'"));
    let ladder = std::fs::read_to_string(dir.path().join("reduce.ladder.csv")).unwrap();
    assert!(ladder.starts_with("sector [index],n [level]"));
}
