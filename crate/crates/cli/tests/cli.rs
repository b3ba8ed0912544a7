//! End-to-end checks of the command-line surface: output shapes, exit
//! codes and the --out flag.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qregular"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn coeffs_matches_known_values() {
    let out = run(&["coeffs", "--ell", "2", "--trunc", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0 1\n1 2\n2 3\n");

    let out = run(&[
        "coeffs", "--ell", "4", "--trunc", "2", "--mod", "4", "--format", "csv",
    ]);
    assert_eq!(stdout(&out), "n,value\n0,1\n1,2\n2,1\n");
}

#[test]
fn coeffs_rejects_small_ell() {
    let out = run(&["coeffs", "--ell", "1", "--trunc", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_known_forms() {
    let out = run(&["certify", "12^2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["level"], 144);
    assert_eq!(doc["weight"], 1);
    assert_eq!(doc["holomorphic"], true);

    let out = run(&["certify", "4^6", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["level"], 16);
    assert_eq!(doc["weight"], 3);
    assert_eq!(doc["holomorphic"], true);

    let out = run(&["certify", "1^-2"]);
    assert!(stdout(&out).contains("holomorphic: false"));
}

#[test]
fn certify_warns_on_fractional_leading_exponent() {
    let out = run(&["certify", "1^1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["holomorphic"], false);
    assert!(doc["warnings"][0]
        .as_str()
        .unwrap()
        .contains("leading exponent"));
}

#[test]
fn certify_rejects_garbage() {
    assert_eq!(run(&["certify", "12^"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "0^2"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes_follow_verdicts() {
    let ok = run(&["verify", "cor8.2", "p=3", "k=0", "j=1", "--nmax", "300"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("holds"));

    // The published sign of thm8.3 fails its scan, so the batch exits 1.
    let mixed = run(&[
        "verify", "thm8.3", "p=3", "k=1", "r=0", "--nmax", "300", "--format", "csv",
    ]);
    assert_eq!(mixed.status.code(), Some(1));
    let text = stdout(&mixed);
    assert!(text.lines().count() == 3);
    assert!(text.contains("fails") && text.contains("holds"));

    let usage = run(&["verify", "cor6.2", "p=2", "k=0", "j=1"]);
    assert_eq!(usage.status.code(), Some(2));

    let unknown = run(&["verify", "thm9.9", "p=3"]);
    assert_eq!(unknown.status.code(), Some(2));

    let bad_key = run(&["verify", "cor6.2", "p=5", "q=1"]);
    assert_eq!(bad_key.status.code(), Some(2));

    let missing = run(&["verify", "cor6.2", "p=5"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn seed_flag_is_accepted_and_inert() {
    let plain = run(&["coeffs", "--ell", "2", "--trunc", "10"]);
    let seeded = run(&["coeffs", "--ell", "2", "--trunc", "10", "--seed", "42"]);
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(plain.stdout, seeded.stdout);
}

#[test]
fn density_validates_checkpoints() {
    let out = run(&[
        "density",
        "--ell",
        "4",
        "--mod",
        "2",
        "--checkpoints",
        "10,100",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let unsorted = run(&[
        "density",
        "--ell",
        "4",
        "--mod",
        "2",
        "--checkpoints",
        "100,10",
    ]);
    assert_eq!(unsorted.status.code(), Some(2));

    let too_big = run(&[
        "density",
        "--ell",
        "4",
        "--mod",
        "2",
        "--checkpoints",
        "2000000",
    ]);
    assert_eq!(too_big.status.code(), Some(2));
}

#[test]
fn hecke_identity_and_eigen_scaling() {
    // No operators: the head is the expansion itself.
    let id = run(&["hecke", "12^2", "--primes", "", "--trunc", "100"]);
    assert_eq!(id.status.code(), Some(2)); // empty prime token is a parse error

    let id = run(&["hecke", "12^2", "--trunc", "100"]);
    assert_eq!(id.status.code(), Some(0));
    let text = stdout(&id);
    assert!(text.contains("q^1: 1"));
    assert!(text.contains("q^13: -2"));

    // T_13 scales the eigenform by -2.
    let scaled = run(&["hecke", "12^2", "--primes", "13", "--trunc", "400"]);
    let text = stdout(&scaled);
    assert!(text.contains("q^1: -2"));
    assert!(text.contains("q^13: 4"));
}

#[test]
fn hecke_probe_reports_vanishing_prefix() {
    let out = run(&[
        "hecke",
        "24^4 * 48^-2",
        "--primes",
        "5",
        "--mod",
        "2",
        "--trunc",
        "5000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("probe:"), "{text}");

    // probing with p = 3 violates the coprime-to-6 requirement
    let bad = run(&[
        "hecke",
        "24^4 * 48^-2",
        "--primes",
        "3",
        "--mod",
        "2",
        "--trunc",
        "1000",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn hecke_rejects_half_integral_weight() {
    let out = run(&["hecke", "24^1", "--primes", "5", "--trunc", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qregular-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("coeffs.csv");
    let out = run(&[
        "coeffs",
        "--ell",
        "2",
        "--trunc",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "n,value\n0,1\n1,2\n2,3\n"
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
