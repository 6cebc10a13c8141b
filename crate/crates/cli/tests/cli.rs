//! End-to-end tests of the `synmom` binary: exit codes, report shapes,
//! and rerun determinism.

use std::io::Write;
use std::process::{Command, Output};

fn synmom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synmom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        !output.stdout.is_empty(),
        "no stdout; stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn code_info_five_qubit() {
    let out = synmom(&["code-info", "five_qubit"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["n"], 5);
    assert_eq!(json["m"], 0);
    assert_eq!(json["distance"], "3");
    assert_eq!(json["pure_distance"], "3");
    assert_eq!(json["group_size"], 16);
}

#[test]
fn code_info_toric_and_repetition() {
    let out = synmom(&["code-info", "toric", "--L", "3", "--max-weight", "4"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["n"], 18);
    assert_eq!(json["generators"], 16);
    assert_eq!(json["pure_distance"], "3");

    let out = synmom(&["code-info", "repetition", "-n", "3"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["kind"], "classical");
    assert_eq!(json["distance"], "3");
}

#[test]
fn code_info_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "stabilizer 5 0\nXZZXI\nIXZZX\nXIXZZ\nZXIXZ\n").unwrap();
    let path = file.path().to_str().unwrap();
    let out = synmom(&["code-info", path, "--file"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["n"], 5);
    assert_eq!(json["distance"], "3");
}

#[test]
fn check_exit_codes_follow_verdict() {
    let out = synmom(&["check", "--code", "five_qubit", "-t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["report"]["identifiable"], true);
    assert_eq!(json["report"]["equivalent_condition"], true);
    assert_eq!(json["report"]["full_rank"], true);

    let out = synmom(&["check", "--code", "five_qubit", "-t", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["report"]["identifiable"], false);
    assert!(json["report"]["witness"].is_object());

    let out = synmom(&[
        "check",
        "--code",
        "repetition",
        "--param",
        "3",
        "-t",
        "1",
        "--metric",
        "hamming",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn estimate_exact_recovers_planted_rates() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rates.csv");
    let config = serde_json::json!({
        "code": {"catalog": "five_qubit"},
        "noise": {"uniform_qubit_rates": [0.9, 0.05, 0.03, 0.02]},
        "mode": "exact",
        "outputs": {"csv": csv_path.to_str().unwrap()}
    });
    let config_path = dir.path().join("exp.json");
    std::fs::write(&config_path, config.to_string()).unwrap();

    let out = synmom(&["estimate", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert!(json["report"]["residual"].as_f64().unwrap() < 1e-10);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("qubit,p_i,p_x,p_z,p_y"));
    let planted = [0.9, 0.05, 0.03, 0.02];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        for (value, expected) in fields[1..].iter().zip(planted) {
            let v: f64 = value.parse().unwrap();
            assert!((v - expected).abs() < 1e-10, "{line}");
        }
    }
}

#[test]
fn sampled_runs_are_bit_identical() {
    let args = [
        "estimate",
        "--code",
        "five_qubit",
        "--rates",
        "0.9,0.05,0.03,0.02",
        "--mode",
        "sample",
        "--shots",
        "20000",
        "--seed",
        "123",
    ];
    let a = synmom(&args);
    let b = synmom(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "reruns differ");

    let sim = [
        "simulate",
        "--code",
        "five_qubit",
        "--rates",
        "0.8,0.1,0.06,0.04",
        "--shots",
        "5000",
        "--seed",
        "9",
    ];
    let a = synmom(&sim);
    let b = synmom(&sim);
    assert_eq!(a.stdout, b.stdout);
    let json = stdout_json(&a);
    let total: u64 = json["report"]["histogram"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["count"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 5000);
}

#[test]
fn undersampled_estimation_exits_two() {
    let out = synmom(&[
        "estimate",
        "--code",
        "five_qubit",
        "--rates",
        "0.6,0.2,0.1,0.1",
        "--mode",
        "sample",
        "--shots",
        "10",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-positive"));

    // Clamping turns the failure into a warning.
    let out = synmom(&[
        "estimate",
        "--code",
        "five_qubit",
        "--rates",
        "0.6,0.2,0.1,0.1",
        "--mode",
        "sample",
        "--shots",
        "10",
        "--seed",
        "3",
        "--clamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert!(!json["report"]["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn non_identifiable_estimation_exits_one() {
    // Two-qubit supports on the five-qubit code are not identifiable.
    let config = serde_json::json!({
        "code": {"catalog": "five_qubit"},
        "noise": {"channels": [
            {"support": [1, 2, 6, 7], "dist": [0.85, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01,
                                                0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]},
            {"support": [1, 3, 6, 8], "dist": [0.85, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01,
                                                0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]},
            {"support": [2, 3, 7, 8], "dist": [0.85, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01,
                                                0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]}
        ]},
        "mode": "exact"
    });
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = synmom(&["estimate", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_three() {
    let out = synmom(&["estimate", "--config", "/nonexistent/exp.json"]);
    assert_eq!(out.status.code(), Some(3));

    let out = synmom(&["code-info", "bogus"]);
    assert_eq!(out.status.code(), Some(3));

    // Unknown config fields are rejected.
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.json");
    std::fs::write(
        &config_path,
        r#"{"code": {"catalog": "five_qubit"}, "bogus_field": 1}"#,
    )
    .unwrap();
    let out = synmom(&[
        "check",
        "--config",
        config_path.to_str().unwrap(),
        "-t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "schur-chain", "--n", "5", "--t", "3"],
        vec!["verify", "intersection-matrix", "--n", "5", "--t", "2"],
        vec![
            "verify",
            "orthogonal-array",
            "--code",
            "five_qubit",
            "--max-size",
            "2",
        ],
        vec!["verify", "rank-condition", "--count", "40"],
        vec!["verify", "symmetries", "--code", "five_qubit"],
    ] {
        let out = synmom(&args);
        assert_eq!(out.status.code(), Some(0), "suite {args:?} failed");
        let json = stdout_json(&out);
        assert_eq!(json["pass"], true);
    }
    let out = synmom(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn data_syndrome_estimation_via_config() {
    // A data-syndrome code from a file plus measurement-flip channels.
    let base = synmom::codes::five_qubit();
    let a = synmom::gf2::BitMatrix::from_rows(
        vec![
            "1".parse().unwrap(),
            "1".parse().unwrap(),
            "1".parse().unwrap(),
            "1".parse().unwrap(),
        ],
        1,
    )
    .unwrap();
    let ds = synmom::codes::build_data_syndrome(&base, &a).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("ds.code");
    std::fs::write(&code_path, ds.to_text()).unwrap();

    let config = serde_json::json!({
        "code": {"file": code_path.to_str().unwrap()},
        "noise": {"uniform_qubit_rates": [0.9, 0.05, 0.03, 0.02], "meas_flip": 0.02},
        "mode": "exact"
    });
    let config_path = dir.path().join("exp.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = synmom(&["estimate", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    let rates = json["report"]["pauli_rates"].as_array().unwrap();
    assert_eq!(rates.len(), 5);
    for r in rates {
        assert!((r["p_i"].as_f64().unwrap() - 0.9).abs() < 1e-9);
    }
    // The measurement-bit marginals carry the planted flip rate.
    let marginals = json["report"]["marginals"].as_array().unwrap();
    let meas_marginals: Vec<_> = marginals
        .iter()
        .filter(|m| m["support"].as_array().unwrap().len() == 1)
        .collect();
    assert_eq!(meas_marginals.len(), 5);
    for m in meas_marginals {
        assert!((m["dist"][1].as_f64().unwrap() - 0.02).abs() < 1e-9);
    }
}
