use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilflux")).args(args).output().expect("binary runs")
}

fn run_config(dir: &Path, task: &str, model: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{task}.json"));
    std::fs::write(&path, config).unwrap();
    let mut args = vec![task, "--model", model, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    nilflux(&args)
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn flux_subgroup_lists_ds_and_dy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(
        dir.path(),
        "flux-subgroup",
        "kodaira-thurston",
        r#"{"omega": {"family": "standard"}, "loops": "preset"}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = json_out(&o);
    let gens: Vec<&str> = r["result"]["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["flux"]["text"].as_str().unwrap())
        .collect();
    assert_eq!(gens, ["ds", "dy"]);
    assert!(r["conventions"]["isotopy"].is_string());
    assert!(r["conventions"]["poincare_dual"].is_string());
}

#[test]
fn second_cohomology_has_rank_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "cohomology", "kodaira-thurston", r#"{"degree": 2}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_out(&o);
    assert_eq!(r["result"]["groups"][0]["betti"], 4);
    assert_eq!(r["result"]["groups"][0]["representatives"].as_array().unwrap().len(), 4);
}

#[test]
fn decimal_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(
        dir.path(),
        "displace-quotient",
        "kodaira-thurston",
        r#"{"map": {"family": "phi-abc", "params": ["0.33", "0", "0"]}, "region": [{"coord": "t", "fixed": "0"}]}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let r = json_out(&o);
    let msg = r["error"]["message"].as_str().unwrap();
    assert!(msg.contains("config.map.params[0]"), "{msg}");
    assert!(msg.contains("decimal"), "{msg}");
}

#[test]
fn schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "flux", "kodaira-thurston", r#"{"omega": {"famly": "standard"}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    let msg = json_out(&o)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("omega"), "{msg}");
}

#[test]
fn violated_preconditions_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(
        dir.path(),
        "displace-quotient",
        "kodaira-thurston",
        r#"{"map": {"matrix": [["1","0","0","0"],["0","1","0","0"],["0","0","1","1/2"],["0","0","0","1"]]},
            "region": [{"coord": "s", "fixed": "0"}, {"coord": "x", "fixed": "0"}]}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_out(&o)["error"]["kind"], "precondition");
}

#[test]
fn inconclusive_verdicts_exit_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(
        dir.path(),
        "displace-commutator",
        "kodaira-thurston",
        r#"{"map": {"matrix": [["1","0","0","0"],["0","1","0","0"],["0","0","1","-1"],["0","0","0","1"]],
                    "translation": ["0","0","1/3","0"]},
            "partial": {"rule": {"translation": ["0","0","0","-1/4"]},
                        "domain": [{"expr": "s", "lower": "-1/8", "upper": "1/8"}, {"expr": "x", "lower": "-1/8", "upper": "1/8"}],
                        "preserved": ["s", "x"]},
            "v0": [{"expr": "s", "lower": "-1/8", "upper": "1/8"}, {"expr": "x", "lower": "-1/8", "upper": "1/8"},
                   {"expr": "y", "lower": "0", "upper": "1/8"}]}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["result"]["outcome"], "inconclusive");
}

#[test]
fn text_format_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(
        dir.path(),
        "check-symplectic",
        "kodaira-thurston",
        r#"{"omega": {"family": "abef", "params": ["a", "b", "e", "f"]}}"#,
        &["--format", "text"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("check-symplectic on kodaira-thurston"));
    assert!(text.contains("volume: -a*f + b*e") || text.contains("volume: b*e - a*f"), "{text}");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"map": {"family": "phi-abc", "params": ["0", "1/2", "0"]},
                  "region": [{"coord": "s", "fixed": "0"}, {"coord": "x", "fixed": "0"}]}"#;
    let a = run_config(dir.path(), "displace-quotient", "kodaira-thurston", cfg, &[]);
    let b = run_config(dir.path(), "displace-quotient", "kodaira-thurston", cfg, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_reproduction_case_passes() {
    let o = nilflux(&["reproduce", "all"]);
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), nilflux_cli::reproduce::CASES.len());
    assert!(!out.contains("FAIL"));
}

#[test]
fn unknown_case_lists_the_registry() {
    let o = nilflux(&["reproduce", "no-such-case"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("theorem-flux") && err.contains("linear-case-3"), "{err}");
}

#[test]
fn model_documents_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("t2.json");
    std::fs::write(
        &model,
        r#"{"name": "t2", "coordinates": ["p", "q"], "frame_names": ["dp", "dq"],
            "coframe": [{"terms": [{"indices": ["dp"], "coeff": "1"}]}, {"terms": [{"indices": ["dq"], "coeff": "1"}]}],
            "generators": [{"translation": ["1", "0"]}, {"translation": ["0", "1"]}],
            "pi1": {"labels": ["p", "q"], "center": [[1, 0], [0, 1]]}}"#,
    )
    .unwrap();
    let o = run_config(dir.path(), "cohomology", model.to_str().unwrap(), r#"{}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let betti: Vec<i64> = json_out(&o)["result"]["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["betti"].as_i64().unwrap())
        .collect();
    assert_eq!(betti, [1, 2, 1]);
}
