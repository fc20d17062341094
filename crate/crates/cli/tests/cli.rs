use std::path::PathBuf;
use std::process::{Command, Output};

use involutor_cli::{generate, main_with, CliError, GenKind, MetricKind, SCHEMA_VERSION};
use involutor_core::text::parse_system;
use involutor_core::Error;
use serde_json::Value;

fn sys(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join(format!("../../systems/{name}.sys"))
        .display()
        .to_string()
}

fn involutor(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_involutor"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = involutor(&all, &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn report_has_common_fields() {
    for args in [
        vec!["complete", sys("ex221").as_str()]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>(),
        vec!["cc".into(), sys("ex13_adjoint_cc")],
        vec!["sequence".into(), sys("ex213")],
        vec!["paramtest".into(), sys("ex39")],
        vec![
            "rank".into(),
            "--gen".into(),
            "einstein".into(),
            "--n".into(),
            "4".into(),
        ],
    ] {
        let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let v = json(&args);
        assert_eq!(v["version"], SCHEMA_VERSION);
        assert_eq!(v["command"], args[0]);
        for key in [
            "input_hash",
            "dims",
            "orders",
            "boards",
            "characters",
            "operators",
        ] {
            assert!(v.get(key).is_some(), "{} lacks {key}", args[0]);
        }
        assert_eq!(v["input_hash"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn output_is_deterministic() {
    let a = involutor(&["--json", "sequence", &sys("ex221")], &[]);
    let b = involutor(&["--json", "sequence", &sys("ex221")], &[]);
    assert_eq!(a.stdout, b.stdout);
    let h1 = json(&["rank", &sys("ex39")])["input_hash"].clone();
    let h2 = json(&["rank", &sys("ex310")])["input_hash"].clone();
    assert_ne!(h1, h2);
    assert_eq!(h1, json(&["cc", &sys("ex39")])["input_hash"]);
}

#[test]
fn completion_report_in_text() {
    let out = involutor(&["complete", &sys("ex221")], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("involutive at order 2"));
    assert!(text.contains("characters: alpha = [2, 0, 0]"));
}

#[test]
fn characters_in_json() {
    let v = json(&["complete", &sys("ex221")]);
    assert_eq!(v["characters"][0]["alpha"], serde_json::json!([2, 0, 0]));
    assert_eq!(v["characters"][0]["q"], 2);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(involutor(&["complete"], &[]).status.code(), Some(2));
    assert_eq!(involutor(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(
        involutor(&["rank", "--gen", "killing"], &[]).status.code(),
        Some(2)
    );
    assert_eq!(
        involutor(&["adjoint", &sys("ex39"), "--weighted"], &[])
            .status
            .code(),
        Some(2)
    );
    let bad = std::env::temp_dir().join("involutor_bad_axis.sys");
    std::fs::write(&bad, "system x { indep: x1; dep: u; eq: d(u,2) = 0; }\n").unwrap();
    let out = involutor(&["complete", bad.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("axis"));
}

#[test]
fn exhausted_budget_exits_with_one() {
    let out = involutor(&["cc", &sys("ex221")], &[("INVOLUTOR_BUDGET", "0")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn error_codes() {
    assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    assert_eq!(
        CliError::Engine(Error::Malformed("x".into())).exit_code(),
        2
    );
    assert_eq!(
        CliError::Engine(Error::Invariant("x".into())).exit_code(),
        3
    );
    assert_eq!(CliError::Engine(Error::Budget("x".into())).exit_code(), 1);
}

#[test]
fn generated_operator_round_trips() {
    let (out, _, code) = main_with(["involutor", "gen", "killing", "--n", "3"]);
    assert_eq!(code, 0);
    let parsed = parse_system(&out).unwrap().to_opmatrix();
    assert_eq!(
        parsed,
        generate(GenKind::Killing, 3, MetricKind::Euclidean).unwrap()
    );
}

#[test]
fn reduce_reports_certificates() {
    let v = json(&[
        "reduce",
        "--gen",
        "box-weyl",
        "--n",
        "4",
        "--metric",
        "minkowski",
        "--by-gen",
        "ricci",
    ]);
    assert_eq!(v["verdict"], "all rows reduce to zero");
    assert_eq!(v["dims"], serde_json::json!([10, 10]));
}

#[test]
fn minparam_from_a_given_parametrization() {
    let v = json(&[
        "minparam",
        &sys("stress3"),
        "--from-gen",
        "beltrami",
        "--n",
        "3",
    ]);
    assert_eq!(v["rank"], 3);
    assert!(v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c.as_array().unwrap().len() == 3));
    let out = involutor(
        &[
            "minparam",
            &sys("stress3"),
            "--from-gen",
            "riemann",
            "--n",
            "3",
        ],
        &[],
    );
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn sections_of_the_airy_equation() {
    let v = json(&["sections", &sys("airy"), "--order", "3"]);
    assert_eq!(v["dims"], serde_json::json!([3, 3]));
    assert_eq!(v["verdict"], "finite type, dim R = 3");
    assert_eq!(v["parametric"], serde_json::json!(["y2", "y1", "y"]));
}

#[test]
fn cohomology_of_a_finite_type_symbol() {
    let v = json(&["cohomology", &sys("ex213"), "--form", "1", "--order", "2"]);
    assert_eq!(v["command"], "cohomology");
    assert_eq!(v["dims"].as_array().unwrap().len(), 4);
    let out = involutor(
        &["cohomology", &sys("ex213"), "--form", "1", "--order", "1"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}
