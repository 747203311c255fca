//! End-to-end checks of the command-line harness: exit codes, report
//! streams, determinism, and configuration precedence.

use std::process::{Command, Output};

fn ellint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellint"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn schema_prints_versioned_document() {
    let out = ellint(&["--schema"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"schema_version\":1"));
}

#[test]
fn list_prints_registry() {
    let out = ellint(&["--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["univariate", "new_an", "ros", "contiguous"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ellint(&[]).status.code(), Some(2));
    assert_eq!(ellint(&["verify"]).status.code(), Some(2));
    assert_eq!(ellint(&["verify", "unknown_identity"]).status.code(), Some(2));
    assert_eq!(ellint(&["frobnicate", "univariate"]).status.code(), Some(2));
    // odd grid and too-small grid are configuration errors
    assert_eq!(
        ellint(&["verify", "univariate", "--grid", "7"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ellint(&["verify", "univariate", "--grid", "4"]).status.code(),
        Some(2)
    );
    // inverted caps
    assert_eq!(
        ellint(&["verify", "univariate", "--m-cap", "0.9", "--modulus-cap", "0.3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_univariate_emits_reports_and_passes() {
    let out = ellint(&["verify", "univariate", "--samples", "2", "--grid", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        assert!(line.starts_with("{\"schema\":1,\"identity\":\"univariate\""));
        assert!(line.contains("\"pass\":true"));
        assert!(line.contains("\"elapsed_ms\":0"));
    }
}

#[test]
fn verify_streams_are_byte_identical_and_job_invariant() {
    let base = ellint(&["verify", "theta3", "--samples", "4"]);
    let again = ellint(&["verify", "theta3", "--samples", "4"]);
    let parallel = ellint(&["verify", "theta3", "--samples", "4", "--jobs", "3"]);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(base.stdout, again.stdout);
    assert_eq!(base.stdout, parallel.stdout);
}

#[test]
fn verify_identity_flag_matches_positional() {
    let positional = ellint(&["verify", "ros", "--samples", "2"]);
    let flagged = ellint(&["verify", "--identity", "ros", "--samples", "2"]);
    assert_eq!(positional.stdout, flagged.stdout);
}

#[test]
fn verify_series_with_explicit_box() {
    let out = ellint(&[
        "verify", "ros", "--n", "3", "--N", "2,1,2", "--seed", "7", "--samples", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"lambda_box\":[2,1,2]"));
}

#[test]
fn verify_fails_with_exit_1_on_unreachable_tolerance() {
    let out = ellint(&[
        "verify",
        "univariate",
        "--samples",
        "1",
        "--grid",
        "32",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"pass\":false"));
}

#[test]
fn config_file_fills_defaults_but_flags_win() {
    let dir = std::env::temp_dir().join(format!("ellint-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ellint.conf");
    std::fs::write(
        &path,
        "# defaults for smoke runs\nsamples = 3\ngrid = 64\ntol = 1e-2\n",
    )
    .unwrap();
    let conf = path.to_str().unwrap();

    let from_file = ellint(&["verify", "univariate", "--config", conf]);
    assert_eq!(from_file.status.code(), Some(0));
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "samples from config file");
    assert!(text.contains("\"N\":64"));

    let overridden = ellint(&["verify", "univariate", "--config", conf, "--samples", "1"]);
    let text = String::from_utf8(overridden.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "flag beats config");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_reports_convergence_and_passes() {
    let out = ellint(&[
        "sweep",
        "univariate",
        "--samples",
        "1",
        "--grids",
        "32,64,128",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("N=32"));
    assert!(err.contains("N=128"));
    let reports = String::from_utf8(out.stdout).unwrap();
    assert_eq!(reports.lines().count(), 3);
}

#[test]
fn sweep_rejects_pointwise_identities() {
    let out = ellint(&["sweep", "theta1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_cap_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_ellint"))
        .args(["verify", "univariate", "--samples", "1", "--grid", "256"])
        .env("ELLINT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budget"), "stderr: {err}");
}
