use std::process::{Command, Output};

fn simonq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simonq"))
        .args(args)
        .env_remove("SIMONQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn encrypt_vector() {
    let o = simonq(&[
        "simon",
        "encrypt",
        "--variant",
        "32/64",
        "--key",
        "1918111009080100",
        "--pt",
        "65656877",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "C69BE9BB");
    let o = simonq(&[
        "simon",
        "decrypt",
        "--variant",
        "32/64",
        "--key",
        "1918111009080100",
        "--ct",
        "C69BE9BB",
    ]);
    assert_eq!(stdout(&o).trim(), "65656877");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        simonq(&[
            "simon",
            "encrypt",
            "--variant",
            "16/32",
            "--key",
            "0",
            "--pt",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        simonq(&["estimate", "table", "--id", "7"]).status.code(),
        Some(2)
    );
    assert_eq!(simonq(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn table_csv_and_json() {
    let o = simonq(&["estimate", "table", "--id", "4", "--format", "csv"]);
    assert!(stdout(&o)
        .starts_with("round,not,cnot,toff_c,h,toff_h,toff_s,cliff,t,t_depth,full_depth,qubits\n"));
    for mode in ["strict", "paper"] {
        let o = simonq(&[
            "estimate", "table", "--id", "12", "--format", "json", "--mode", mode,
        ]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        for r in v["rows"].as_array().unwrap() {
            assert_eq!(r["mode"], mode);
        }
    }
}

#[test]
fn seeded_runs_are_identical() {
    let args = [
        "--seed",
        "5",
        "qaa",
        "simulate",
        "--space-bits",
        "14",
        "--marked",
        "4",
    ];
    let a = simonq(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, simonq(&args).stdout);
    let c = [
        "--seed", "5", "circuit", "build", "--part", "oracle", "--rounds", "6", "--format", "qasm",
    ];
    assert_eq!(simonq(&c).stdout, simonq(&c).stdout);
}

#[test]
fn toy_attack_recovers_key() {
    let o = simonq(&[
        "--seed",
        "3",
        "attack",
        "toy",
        "--unknown-bits",
        "8",
        "--index-bits",
        "8",
        "--phase2-bits",
        "6",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["planted_key"], v["recovered_key"]);
}

#[test]
fn out_dir_receives_relative_paths() {
    let dir = std::env::temp_dir().join(format!("simonq-cli-{}", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_simonq"))
        .args([
            "estimate", "table", "--id", "5", "--format", "csv", "--out", "t5.csv",
        ])
        .env("SIMONQ_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.join("t5.csv")).unwrap();
    assert!(text.contains("32/64 r19,480,5568,14987,128,4282,2141,27586,14987,1293,4434,255"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_reports_mismatch_exit_code() {
    assert_eq!(
        simonq(&["verify", "--suite", "simon"]).status.code(),
        Some(0)
    );
    assert_eq!(
        simonq(&["verify", "--suite", "complexity"]).status.code(),
        Some(3)
    );
}
