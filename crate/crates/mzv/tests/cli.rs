//! End-to-end checks of the command-line interface.

use std::process::Command;

fn mzv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mzv"))
        .args(args)
        .output()
        .expect("failed to run mzv")
}

fn stdout(args: &[&str]) -> String {
    let out = mzv(args);
    assert!(
        out.status.success(),
        "mzv {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn shuffle_json_is_exact() {
    let got = stdout(&["shuffle", "xy", "xy", "--format", "json"]);
    assert_eq!(
        got,
        "{\"terms\":[{\"coeff\":\"4\",\"word\":\"xxyy\"},{\"coeff\":\"2\",\"word\":\"xyxy\"}]}\n"
    );
}

#[test]
fn shuffle_is_deterministic() {
    let a = stdout(&["shuffle", "z2z1", "z3", "--format", "json"]);
    let b = stdout(&["shuffle", "z2z1", "z3", "--format", "json"]);
    assert_eq!(a, b);
}

#[test]
fn zmap_non_admissible_is_a_domain_error() {
    let out = mzv(&["zmap", "yx"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not in H0"), "stderr: {err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = mzv(&["shuffle", "xy", "xy", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_mode_emits_one_document() {
    for args in [
        vec!["stuffle", "z2", "z3"],
        vec!["zmap", "xxy"],
        vec!["layout", "--r", "2", "--p", "2", "--q", "1"],
        vec!["pfd-trace", "2", "2,1"],
        vec!["reduce", "2,0,2,0,1,0", "--rank", "3"],
        vec!["gen-dsr", "--max-weight", "5"],
        vec!["ext-dsr", "--w1", "y", "--w2", "xy"],
        vec!["regularize", "--word", "yxy"],
    ] {
        let mut full = args.clone();
        full.extend(["--format", "json"]);
        let got = stdout(&full);
        let v: serde_json::Value = serde_json::from_str(&got)
            .unwrap_or_else(|e| panic!("{args:?}: invalid JSON ({e}): {got}"));
        assert!(v.is_object() || v.is_array());
        assert_eq!(got.matches('\n').count(), 1, "{args:?} printed extra lines");
    }
}

#[test]
fn builtin_verification_passes() {
    let got = stdout(&["verify", "--builtin", "euler-3-1-1"]);
    assert!(got.contains("PASS"), "got: {got}");
}

#[test]
fn gen_dsr_output_round_trips_into_verify() {
    let dir = std::env::temp_dir().join(format!("mzv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rels.json");
    let rels = stdout(&["gen-dsr", "--max-weight", "5", "--format", "json"]);
    std::fs::write(&path, rels).unwrap();
    let got = stdout(&["verify", "--file", path.to_str().unwrap(), "--tol", "1e-6"]);
    assert!(got.lines().all(|l| l.contains("PASS")), "got: {got}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_sets_eval_params() {
    let dir = std::env::temp_dir().join(format!("mzv-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eval.toml");
    std::fs::write(&path, "mzv_m = 64\ntolerance = 1.0\n").unwrap();
    // Coarse truncation from the config visibly degrades the estimate.
    let coarse = stdout(&[
        "eval",
        "--mzv",
        "2",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let fine = stdout(&["eval", "--mzv", "2", "--format", "json"]);
    assert_ne!(coarse, fine);
    // A flag overrides the config.
    let overridden = stdout(&[
        "eval",
        "--mzv",
        "2",
        "--config",
        path.to_str().unwrap(),
        "--mzv-m",
        "10000",
        "--format",
        "json",
    ]);
    assert_eq!(overridden, fine);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn functional_family_verifies_at_real_arguments() {
    let got = stdout(&[
        "functional",
        "--family",
        "5-5",
        "--p1",
        "2",
        "--p2",
        "2",
        "--s1",
        "2.5",
    ]);
    assert!(got.contains("PASS"), "got: {got}");
}
