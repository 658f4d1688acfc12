use std::path::PathBuf;

use poc_mobility::cli::{run, EXIT_ANALYSIS, EXIT_OK, EXIT_ORACLE, EXIT_PARSE};
use poc_mobility::report::from_json;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn oracle_flag_reports_agreement() {
    let out = run(["pocmob", "analyze", "--oracle", "--seeds", "5", &fixture("tricept.mech")], None);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("oracle: 5/5 agree"), "{}", out.stdout);
}

#[test]
fn idle_mobility_is_an_oracle_disagreement() {
    let out = run(["pocmob", "analyze", "--oracle", "--seeds", "3", &fixture("idle-spin.mech")], None);
    assert_eq!(out.code, EXIT_ORACLE);
    assert!(out.stdout.contains("platform dimension 1 vs DOF 2"));
}

#[test]
fn strict_policy_refuses_general_position() {
    let out = run(["pocmob", "analyze", "--policy", "strict", &fixture("3rrc.mech")], None);
    assert_eq!(out.code, EXIT_ANALYSIS);
    assert!(out.stderr.contains("indeterminate relation"), "{}", out.stderr);
}

#[test]
fn parse_errors_outrank_everything_else() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mech");
    std::fs::write(&bad, "mechanism broken\nleg 1: R ?? R\n").unwrap();
    let out = run(
        ["pocmob", "analyze", "--oracle", "--seeds", "2", &fixture("idle-spin.mech"), bad.to_str().unwrap()],
        None,
    );
    assert_eq!(out.code, EXIT_PARSE);
    assert!(out.stderr.contains("bad.mech: line 2"), "{}", out.stderr);
}

#[test]
fn batch_keeps_input_order() {
    let files = [fixture("3rrc.mech"), fixture("tricept.mech"), fixture("three-p.mech")];
    let mut args = vec!["pocmob".to_string(), "analyze".into(), "--format".into(), "structured".into()];
    args.extend(files.iter().cloned());
    let out = run(args, None);
    assert_eq!(out.code, EXIT_OK);
    let names: Vec<String> = from_json(&out.stdout).unwrap().into_iter().map(|r| r.mechanism).collect();
    assert_eq!(names, ["3-RRC", "tricept", "3P"]);
}

#[test]
fn seed_variable_changes_the_seeds() {
    let args = ["pocmob", "analyze", "--oracle", "--seeds", "1", "--format", "structured"];
    let path = fixture("idle-spin.mech");
    let a = run(args.iter().copied().chain([path.as_str()]), Some("7"));
    let b = run(args.iter().copied().chain([path.as_str()]), None);
    let problem = |o: &poc_mobility::cli::RunOutput| from_json(&o.stdout).unwrap()[0].oracle.clone().unwrap().problems;
    assert!(problem(&a)[0].starts_with("seed 7:"));
    assert_ne!(problem(&a), problem(&b));
}
