//! End-to-end runs of the `bomber` binary: flag handling, exit codes,
//! output formats, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use bomber_solver::SolutionField;

fn bomber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bomber"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn run_ok(args: &[&str]) -> String {
    let out = bomber(args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is utf-8")
}

fn exit_code(args: &[&str]) -> i32 {
    bomber(args).status.code().expect("no signal")
}

fn solve_tiny(dir: &Path, name: &str) -> std::path::PathBuf {
    let out = dir.join(name);
    run_ok(&[
        "solve",
        "--v",
        "0.5",
        "--xmax",
        "1.0",
        "--nx",
        "41",
        "--tmax",
        "0.5",
        "--nt",
        "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    out
}

#[test]
fn solve_writes_a_reloadable_field_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("field.bin");
    let stdout = run_ok(&[
        "solve", "--v", "0.5", "--xmax", "1.0", "--nx", "41", "--tmax", "0.5", "--nt", "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("runtime:"));
    assert!(stdout.contains("max P(., t = 0.5)"));
    assert!(stdout.contains("wrote"));

    let mut reader = std::io::BufReader::new(std::fs::File::open(&out).unwrap());
    let field = SolutionField::read_binary(&mut reader).unwrap();
    assert_eq!(field.params().v, 0.5);
    assert_eq!(field.grid().nx, 41);
    assert_eq!(field.grid().nt, 101);

    // Rerunning with identical flags reproduces the file byte for byte.
    let first = std::fs::read(&out).unwrap();
    run_ok(&[
        "solve", "--v", "0.5", "--xmax", "1.0", "--nx", "41", "--tmax", "0.5", "--nt", "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn solve_rejects_bad_parameters_with_usage_errors() {
    assert_eq!(exit_code(&["solve", "--v", "0", "--out", "/tmp/x.bin"]), 2);
    assert_eq!(exit_code(&["solve", "--v", "1.5", "--out", "/tmp/x.bin"]), 2);
    assert_eq!(exit_code(&["solve", "--v", "0.5"]), 2); // no --out anywhere
    assert_eq!(
        exit_code(&[
            "solve", "--v", "0.5", "--nx", "1", "--out", "/tmp/x.bin"
        ]),
        2
    ); // grid precondition
    assert_eq!(
        exit_code(&[
            "solve",
            "--v",
            "0.5",
            "--discrete-step",
            "-1",
            "--out",
            "/tmp/x.bin"
        ]),
        2
    );
}

#[test]
fn boundary_sweep_matches_the_closed_forms() {
    let stdout = run_ok(&["boundary", "--v", "1", "--tmin", "0.1", "--tmax", "5", "--steps", "100"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "t,f_u,g_u,case");
    assert_eq!(lines.len(), 101);
    let mut prev_f = f64::INFINITY;
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        // u = 0 makes the two curves one: the columns must agree textually.
        assert_eq!(cols[1], cols[2], "f and g diverge in {row}");
        assert_eq!(cols[3], "I");
        let f: f64 = cols[1].parse().unwrap();
        assert!(f < prev_f, "f is not strictly decreasing at {row}");
        prev_f = f;
    }
}

#[test]
fn boundary_case_column_flips_at_the_band_threshold() {
    // u = 0.25: the band case applies exactly while t < 4·log 1.5.
    let threshold = 4.0 * 1.5f64.ln();
    let stdout = run_ok(&[
        "boundary", "--v", "0.75", "--tmin", "0.5", "--tmax", "3", "--steps", "251",
    ]);
    for row in stdout.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let t: f64 = cols[0].parse().unwrap();
        let expected = if t < threshold { "IV" } else { "II" };
        assert_eq!(cols[3], expected, "wrong case at t = {t}");
        let f: f64 = cols[1].parse().unwrap();
        let g: f64 = cols[2].parse().unwrap();
        assert!(g <= f, "g must not exceed f at t = {t}");
    }
}

#[test]
fn classify_emits_the_verdict_as_json() {
    // x = 1.03 sits inside the (g, f] band at v = 0.75, t = 0.5.
    let stdout = run_ok(&["classify", "--v", "0.75", "--x", "1.03", "--t", "0.5"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["verdict"], "IndeterminateBand");
    assert_eq!(doc["case"], "IV");
    assert!(doc["f_value"].as_f64().unwrap() > doc["g_value"].as_f64().unwrap());

    let exact = run_ok(&["classify", "--v", "0.75", "--x", "1.03", "--t", "0.5", "--exact"]);
    let doc: serde_json::Value = serde_json::from_str(&exact).unwrap();
    assert_eq!(doc["verdict"], "SpendAll");

    assert_eq!(exit_code(&["classify", "--v", "0.75", "--x", "0", "--t", "0.5"]), 2);
}

#[test]
fn check_reports_on_a_stored_field() {
    let dir = tempfile::tempdir().unwrap();
    let field = solve_tiny(dir.path(), "field.bin");
    let json = dir.path().join("report.json");
    let stdout = run_ok(&[
        "check",
        "--field",
        field.to_str().unwrap(),
        "--boundary",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(stdout.contains("A (K nonincreasing in t)"));
    assert!(stdout.contains("B (K nondecreasing in x)"));
    assert!(stdout.contains("C (x − K nondecreasing in x)"));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for key in ["a", "b", "c", "boundary"] {
        assert!(!doc[key].is_null(), "missing {key} in the json report");
    }
    assert_eq!(doc["a"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(doc["c"]["violations"].as_array().unwrap().len(), 0);

    assert_eq!(exit_code(&["check", "--field", "/nonexistent.bin"]), 1);
}

#[test]
fn asymptotics_emits_the_contract_header() {
    let stdout = run_ok(&["asymptotics", "--v", "1.0", "--rho", "2", "--t", "1e-2"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "t,x,rho,j,K_over_x,alpha,logH_over_x,logP_over_x,beta");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.01,"));

    assert_eq!(exit_code(&["asymptotics", "--v", "1.0", "--rho", "2", "--t", "1.5"]), 2);
    // A tiny rho would need a stock beyond the supported cap.
    assert_eq!(
        exit_code(&["asymptotics", "--v", "1.0", "--rho", "0.01", "--t", "1e-2"]),
        2
    );
}

#[test]
fn simulate_is_reproducible_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let args = [
        "simulate", "--policy", "spend-it-all", "--v", "1.0", "--x0", "0.5", "--t0", "0.5",
        "--trials", "5000", "--seed", "42", "--out",
    ];
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.push(json.to_str().unwrap());
    let first = run_ok(&with_out);
    let first_json = std::fs::read(&json).unwrap();
    let second = run_ok(&with_out);
    assert_eq!(first, second);
    assert_eq!(first_json, std::fs::read(&json).unwrap());

    let doc: serde_json::Value = serde_json::from_slice(&first_json).unwrap();
    assert_eq!(doc["trials"], 5000);
    assert_eq!(doc["seed"], 42);
    let p_hat = doc["p_hat"].as_f64().unwrap();
    assert!(p_hat > 0.0 && p_hat < 1.0);
}

#[test]
fn simulate_from_field_rejects_bad_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let field = solve_tiny(dir.path(), "field.bin");
    let field = field.to_str().unwrap();
    // Start beyond the stored grid.
    assert_eq!(
        exit_code(&[
            "simulate", "--policy", "from-field", "--field", field, "--v", "0.5", "--x0", "5",
            "--t0", "0.3", "--trials", "10",
        ]),
        2
    );
    // Field solved under a different v.
    assert_eq!(
        exit_code(&[
            "simulate", "--policy", "from-field", "--field", field, "--v", "1.0", "--x0", "0.5",
            "--t0", "0.3", "--trials", "10",
        ]),
        2
    );
    // Fraction policy without a fraction.
    assert_eq!(
        exit_code(&[
            "simulate", "--policy", "fixed-fraction", "--v", "0.5", "--x0", "0.5", "--t0", "0.3",
        ]),
        2
    );
    // Happy path on the same field.
    run_ok(&[
        "simulate", "--policy", "from-field", "--field", field, "--v", "0.5", "--x0", "0.5",
        "--t0", "0.3", "--trials", "100",
    ]);
}

#[test]
fn figure_brackets_the_regime_boundaries() {
    let stdout = run_ok(&["figure", "--t", "0.01"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "x,t,j,K_asym");

    let rows: Vec<(f64, u32, f64)> = lines[1..]
        .iter()
        .map(|row| {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 4);
            assert_eq!(cols[1], "0.01");
            (
                cols[0].parse().unwrap(),
                cols[2].parse().unwrap(),
                cols[3].parse().unwrap(),
            )
        })
        .collect();

    let log_abs = -(0.01f64).ln();
    // The boundary markers x = |log t|·j(j+1)/2 appear as explicit rows.
    for j in 1..=4u32 {
        let xb = log_abs * (j * (j + 1)) as f64 / 2.0;
        assert!(
            rows.iter().any(|&(x, _, _)| (x - xb).abs() < 1e-12 * xb),
            "missing boundary row near x = {xb}"
        );
    }
    for pair in rows.windows(2) {
        let (x0, j0, k0) = pair[0];
        let (x1, j1, k1) = pair[1];
        assert!(x1 > x0, "rows must be sorted by x");
        assert!(j1 >= j0, "regime index must not decrease with x");
        if j1 != j0 {
            // Across each regime crossing the bracketing samples sit a
            // relative 1e-7 apart, so continuity shows as a tiny jump.
            assert!(
                (k1 - k0).abs() < 1e-6 * x1,
                "approximation jumps at the regime boundary: {k0} vs {k1}"
            );
        }
        if j0 == 1 && j1 == 1 {
            assert_eq!(k0, x0, "the first regime fires everything");
        }
    }
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "v = 0.5\ntmin = 0.1\ntmax = 2\nsteps = 5\n# comment\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_config = run_ok(&["boundary", "--config", cfg]);
    assert_eq!(from_config.lines().count(), 6);

    let overridden = run_ok(&["boundary", "--config", cfg, "--v", "1.0"]);
    let pure_flags = run_ok(&["boundary", "--v", "1.0", "--tmin", "0.1", "--tmax", "2", "--steps", "5"]);
    assert_eq!(overridden, pure_flags);
    assert_ne!(from_config, overridden, "v must change the curves");

    assert_eq!(exit_code(&["boundary", "--config", "/nonexistent.cfg"]), 2);
}

#[test]
fn thread_cap_is_validated_and_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("field.bin");
    let args = [
        "solve", "--v", "0.5", "--xmax", "1.0", "--nx", "41", "--tmax", "0.5", "--nt", "101",
        "--out",
    ];
    let mut full: Vec<&str> = args.to_vec();
    full.push(out.to_str().unwrap());

    let run_with = |threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_bomber"))
            .args(&full)
            .env("BOMBER_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success(), "solve under BOMBER_THREADS={threads} failed");
        std::fs::read(&out).unwrap()
    };
    let single = run_with("1");
    let multi = run_with("3");
    assert_eq!(single, multi, "thread cap changed the solved field");

    let bad = Command::new(env!("CARGO_BIN_EXE_bomber"))
        .args(&full)
        .env("BOMBER_THREADS", "zebra")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
