//! End-to-end tests of the `bosonic` binary: exit-code contract, file
//! formats, and reproducibility of reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bosonic"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("bosonic-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn verify_amplifier_passes() {
    let spec = write_temp("amp.json", r#"{"preset":"amplifier","gain":2.0}"#);
    let out = run(&["verify", spec.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["version"], bosonic_core::VERSION);
    assert!(report["config"]["seed"].is_u64());
}

#[test]
fn verify_non_cp_channel_fails_with_witness() {
    let r2 = std::f64::consts::SQRT_2;
    let spec = write_temp(
        "noncp.json",
        &format!(
            r#"{{"n":1,"X":[[{r2},0.0],[0.0,{r2}]],"f":{{"kind":"one"}}}}"#
        ),
    );
    let out = run(&["verify", spec.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["checks"]["cp_certificate"]["verdict"], false);
    assert!(report["checks"]["cp_certificate"]["witness"].is_array());
}

#[test]
fn malformed_input_exits_2() {
    let spec = write_temp("broken.json", r#"{"preset":"amplifier","ga"#);
    let out = run(&["verify", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dilate_identity_exact_fails_naming_alternatives() {
    let spec = write_temp("id.json", r#"{"preset":"identity"}"#);
    let out = run(&[
        "dilate",
        spec.to_str().unwrap(),
        "--algorithm",
        "exact",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let msg = report["error"].as_str().unwrap();
    assert!(msg.contains("singular"), "{msg}");
    assert!(msg.contains("var-unitary") && msg.contains("fixed-unitary"));
}

#[test]
fn dilate_identity_fixed_unitary_writes_two_mode_ancilla() {
    let spec = write_temp("id2.json", r#"{"preset":"identity"}"#);
    let dil_path = std::env::temp_dir().join("bosonic-cli-tests/id-dilation.json");
    let out = run(&[
        "dilate",
        spec.to_str().unwrap(),
        "--algorithm",
        "fixed-unitary",
        "--epsilon",
        "0.1",
        "--out",
        dil_path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dil_path).unwrap()).unwrap();
    assert_eq!(file["n"], 1);
    assert_eq!(file["m"], 2);
    assert_eq!(file["provenance"]["kind"], "fixed_unitary");

    // round-trip: simulate from the written dilation file at a small cutoff
    let out = run(&[
        "simulate",
        dil_path.to_str().unwrap(),
        "--state",
        "coherent:0.3",
        "--cutoff",
        "8",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["char_vs_stinespring_discrepancy"].as_f64().unwrap() < 0.2);
}

#[test]
fn dilate_binary_displacement_var_unitary() {
    let spec = write_temp("bd.json", r#"{"preset":"binary_displacement","s":[1.0,0.0]}"#);
    let dil_path = std::env::temp_dir().join("bosonic-cli-tests/bd-dilation.json");
    let out = run(&[
        "dilate",
        spec.to_str().unwrap(),
        "--algorithm",
        "var-unitary",
        "--epsilon",
        "0.05",
        "--out",
        dil_path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["m"], 1);
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "{check:?}");
    }
}

#[test]
fn simulate_identity_channel_on_vacuum() {
    let spec = write_temp("id3.json", r#"{"preset":"identity"}"#);
    let out = run(&["simulate", spec.to_str().unwrap(), "--state", "vacuum", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    let dist = report["trace_distance_input_output"].as_f64().unwrap();
    assert!(dist <= 1e-6, "identity trace distance {dist}");
}

#[test]
fn simulate_binary_displacement_bimodal() {
    let spec = write_temp("bd2.json", r#"{"preset":"binary_displacement","s":[1.0,0.0]}"#);
    let dump = std::env::temp_dir().join("bosonic-cli-tests/bd-state.json");
    let out = run(&[
        "simulate",
        spec.to_str().unwrap(),
        "--state",
        "vacuum",
        "--cutoff",
        "30",
        "--dump-state",
        dump.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    // char-level residual between reconstruction and the cos-modulated
    // Gaussian stays small
    let res = report["char_reconstruction_residual"].as_f64().unwrap();
    assert!(res <= 1e-3, "residual {res}");
    // the dumped state parses and carries the declared shape
    let state: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(state["n"], 1);
    assert_eq!(state["cutoff"], 30);
    assert_eq!(state["re"].as_array().unwrap().len(), 30);
}

#[test]
fn sweep_csv_is_reproducible_and_decreasing() {
    let spec = write_temp("id4.json", r#"{"preset":"identity"}"#);
    let csv_path = std::env::temp_dir().join("bosonic-cli-tests/sweep.csv");
    let args = [
        "sweep",
        spec.to_str().unwrap(),
        "--algorithm",
        "fixed-unitary",
        "--epsilons",
        "0.2,0.1,0.05,0.02,0.01",
        "--state",
        "vacuum",
        "--seed",
        "41",
        "--out",
        csv_path.to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let first = std::fs::read_to_string(&csv_path).unwrap();
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let second = std::fs::read_to_string(&csv_path).unwrap();

    let strip_runtime = |text: &str| -> Vec<String> {
        text.lines()
            .map(|line| {
                let cols: Vec<&str> = line.split(',').collect();
                cols.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != 4)
                    .map(|(_, c)| *c)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    assert_eq!(
        strip_runtime(&first),
        strip_runtime(&second),
        "CSV must be reproducible up to runtime_ms"
    );

    let mut header = true;
    let mut last = f64::INFINITY;
    for line in first.lines() {
        if header {
            assert_eq!(
                line,
                "epsilon,algorithm,char_sup_error,trace_distance,runtime_ms,seed"
            );
            header = false;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let err: f64 = cols[2].parse().unwrap();
        assert!(err < last, "char_sup_error not strictly decreasing");
        assert!(cols[3].is_empty(), "trace_distance column must be empty");
        last = err;
    }
    assert!(last <= 1e-2);
}

#[test]
fn sweep_parallel_matches_serial() {
    let spec = write_temp("id5.json", r#"{"preset":"identity"}"#);
    let csv_path = std::env::temp_dir().join("bosonic-cli-tests/sweep-par.csv");
    let mut serial = bin();
    serial
        .args([
            "sweep",
            spec.to_str().unwrap(),
            "--algorithm",
            "var-unitary",
            "--epsilons",
            "0.2,0.1,0.05",
            "--seed",
            "42",
            "--out",
            csv_path.to_str().unwrap(),
        ])
        .env("BOSONIC_THREADS", "1");
    assert_eq!(serial.output().unwrap().status.code(), Some(0));
    let first = std::fs::read_to_string(&csv_path).unwrap();

    let mut parallel = bin();
    parallel
        .args([
            "sweep",
            spec.to_str().unwrap(),
            "--algorithm",
            "var-unitary",
            "--epsilons",
            "0.2,0.1,0.05",
            "--seed",
            "42",
            "--out",
            csv_path.to_str().unwrap(),
        ])
        .env("BOSONIC_THREADS", "3");
    assert_eq!(parallel.output().unwrap().status.code(), Some(0));
    let second = std::fs::read_to_string(&csv_path).unwrap();

    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|(i, _)| *i != 4)
                    .map(|(_, c)| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn witness_demonstrates_no_go() {
    let out = run(&["witness", "--s", "1,0", "--epsilons", "0.1", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["exact_dilation"]["outcome"], "singular_j");
    let blocks = report["approximations"].as_array().unwrap();
    let points = blocks[0]["points"].as_array().unwrap();
    assert!(points.len() >= 10);
    for p in points {
        assert!((p["cos_value"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
        assert!(p["ancilla_abs"].as_f64().unwrap() <= 1.0 - 1e-3);
    }
}

#[test]
fn witness_zero_displacement_exits_2() {
    let out = run(&["witness", "--s", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_mode_guard_exits_1() {
    // identity fixed-unitary dilation has 3 joint modes; the default
    // cutoff 20 exceeds the simulation guards, which is a numeric limit
    // (exit 1), not an input error
    let spec = write_temp("id6.json", r#"{"preset":"identity"}"#);
    let dil_path = std::env::temp_dir().join("bosonic-cli-tests/id6-dilation.json");
    let out = run(&[
        "dilate",
        spec.to_str().unwrap(),
        "--algorithm",
        "fixed-unitary",
        "--epsilon",
        "0.1",
        "--out",
        dil_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["simulate", dil_path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["error"].as_str().unwrap().contains("guard"));
}
