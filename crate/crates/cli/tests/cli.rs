//! End-to-end tests of the `coinless` binary: output schemas, exit
//! codes, determinism, and the file/env plumbing.

use std::process::{Command, Output};

fn coinless(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coinless"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn simulate_initial_row() {
    let out = coinless(&["simulate", "--side", "6", "--steps", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,p_t,re_overlap,im_overlap");
    let row = lines.next().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "0");
    let p: f64 = fields[1].parse().unwrap();
    assert!((p - 1.0 / 36.0).abs() < 1e-12);
    assert!(lines.next().is_none());
}

#[test]
fn simulate_json_parses() {
    let out = coinless(&["simulate", "--side", "10", "--steps", "12", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 13);
    assert!((rows[0]["p_t"].as_f64().unwrap() - 0.01).abs() < 1e-12);
    assert!(rows[5]["re_overlap"].is_number());
}

#[test]
fn simulate_even_but_not_analytic_side_runs() {
    let out = coinless(&["simulate", "--side", "8", "--steps", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 7);

    // 'auto' needs the analytic prediction, which this parity lacks.
    let out = coinless(&["simulate", "--side", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--steps"));
}

#[test]
fn simulate_marked_vertex() {
    let out = coinless(&["simulate", "--side", "6", "--steps", "3", "--marked", "2,4"]);
    assert!(out.status.success());
    let out_bad = coinless(&["simulate", "--side", "6", "--steps", "3", "--marked", "9,0"]);
    assert_eq!(out_bad.status.code(), Some(1));
}

#[test]
fn analytic_m6_values() {
    let out = coinless(&["analytic", "--side", "6", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - 0.6455).abs() < 1e-3);
    assert_eq!(v["t_pred"].as_i64().unwrap(), 2);
    assert!((v["B_minus_Cx"].as_f64().unwrap() - 0.533333).abs() < 1e-5);
    assert!((v["psi_norm_sq"].as_f64().unwrap() - 1.6).abs() < 1e-9);

    // Identical invocations give byte-identical output.
    let again = coinless(&["analytic", "--side", "6", "--format", "json"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn analytic_rejects_wrong_parity() {
    let out = coinless(&["analytic", "--side", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2 (mod 4)"));
}

#[test]
fn spectrum_table() {
    let out = coinless(&["spectrum", "--side", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,l,theta,overlap_00_w0,overlap_00_w1,identity");
    assert_eq!(lines.len(), 10); // header + 9 blocks
    assert!(lines[1].starts_with("0,0,") && lines[1].ends_with(",1"));
    // Dense-oracle phase goes to the diagnostic stream.
    assert!(stderr(&out).contains("dense-oracle alpha"));

    let json = coinless(&["spectrum", "--side", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["blocks"].as_array().unwrap().len(), 9);
    assert!((v["dense_alpha"].as_f64().unwrap() - 0.5192781436).abs() < 1e-9);

    // Above the cap the table still prints, without the oracle phase.
    let capped = coinless(&["spectrum", "--side", "6", "--cap", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&capped)).unwrap();
    assert!(v["dense_alpha"].is_null());
}

#[test]
fn sweep_range_validation() {
    // 6:62:8 stays in the valid class; 6:62:6 hits 12 and is rejected.
    let ok = coinless(&["sweep", "--sides", "6:14:8", "--window-factor", "4"]);
    assert!(ok.status.success());
    let text = stdout(&ok);
    assert_eq!(text.lines().count(), 3); // header + m=6 + m=14

    let bad = coinless(&["sweep", "--sides", "6:62:6"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("12"));
}

#[test]
fn sweep_schema_and_determinism() {
    let a = coinless(&["sweep", "--sides", "6,10", "--window-factor", "4"]);
    let b = coinless(&["sweep", "--sides", "6,10", "--window-factor", "4"]);
    assert!(a.status.success());
    let ta = stdout(&a);
    let tb = stdout(&b);
    let header = ta.lines().next().unwrap();
    assert_eq!(
        header,
        "m,N,alpha_analytic,alpha_exact,alpha_empirical,t_pred,t_star,p_star,p_pred,\
         claim1_overlap,aa_rounds,aa_total_steps,wall_time_ms"
    );
    // Byte-identical apart from the wall-time column.
    let strip = |t: &str| -> Vec<String> {
        t.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
            .collect()
    };
    assert_eq!(strip(&ta), strip(&tb));

    let json = coinless(&["sweep", "--sides", "6", "--window-factor", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let row = &v.as_array().unwrap()[0];
    for key in header.split(',') {
        assert!(!row[key].is_null() || key == "alpha_empirical", "missing {key}");
    }
    assert_eq!(row["m"].as_i64().unwrap(), 6);
}

#[test]
fn amplify_trace() {
    let out = coinless(&["amplify", "--side", "6", "--max-rounds", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "round,p");
    let last: f64 = lines.last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last >= 0.5, "final p = {last}");
}

#[test]
fn out_file_honors_env_dir() {
    let dir = std::env::temp_dir().join(format!("coinless-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_coinless"))
        .args(["analytic", "--side", "6", "--out", "report.csv"])
        .env("COINLESS_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(written.starts_with("m,N,B_minus_Cx"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_flag_rejected() {
    let out = coinless(&["simulate", "--side", "6", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let help = coinless(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}
