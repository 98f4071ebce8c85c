use std::path::PathBuf;

use nibm::cli::{execute, Cli};
use nibm::gaussian::GaussianNetwork;
use nibm::model::embed::state_adder_channel;
use nibm::model::random::code_function_lists;
use nibm::model::spec::{load_channel, parse_channel};
use nibm::Error;
use clap::Parser;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

#[test]
fn shipped_state_channel_equals_embedding() {
    let parsed = load_channel(&shipped("state_channel.json")).unwrap();
    let built = state_adder_channel(false).unwrap();
    assert_eq!(parsed.channel.k(), built.k());
    assert_eq!(parsed.channel.l(), built.l());
    assert_eq!(parsed.channel.nodes(), built.nodes());
    let lists = code_function_lists(&built).unwrap();
    for f0 in &lists[0] {
        for f1 in &lists[1] {
            let tuple = vec![f0.clone(), f1.clone()];
            let a = parsed.channel.induced_channel(&tuple).unwrap();
            let b = built.induced_channel(&tuple).unwrap();
            assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
            for (y, p) in &a {
                assert!((p - b[y]).abs() < 1e-12);
            }
        }
    }
}

const BSC: &str = r#"{
  "K": 2, "L": 1,
  "nodes": [{"x": [["0","1"]], "y": [["-"]]}, {"x": [["-"]], "y": [["0","1"]]}],
  "messages": [{"name": "W", "source": 1, "sinks": [2]}],
  "channel": {"kernels": [{"0": {"0": "0.9", "1": "0.1"}, "1": {"0": 0.1, "1": 0.9}}]}
}"#;

#[test]
fn minimal_bsc_spec() {
    let p = parse_channel(BSC).unwrap();
    assert_eq!(p.channel.k(), 2);
    assert_eq!(p.channel.l(), 1);
    assert_eq!(p.session.messages()[0].sinks, vec![1]);
}

#[test]
fn malformed_row_is_named() {
    let bad = BSC.replace(r#""1": 0.9"#, r#""1": 0.8"#);
    match parse_channel(&bad) {
        Err(Error::Spec { field, msg }) => {
            assert!(field.contains("kernels[0][\"1\"]"), "{field}");
            assert!(msg.contains("sums to"), "{msg}");
        }
        other => panic!("expected a spec error, got {other:?}"),
    }
}

#[test]
fn unknown_fields_and_bad_gains_are_rejected() {
    assert!(parse_channel(&BSC.replace("\"K\": 2", "\"K\": 2, \"extra\": 1")).is_err());
    let upper = r#"{"K": 2, "L": 2, "P": 1.0, "sinks": [2], "G": {"2,1": [[1, 1], [0, 1]]}}"#;
    assert!(matches!(GaussianNetwork::from_json(upper), Err(Error::NotLowerTriangular(_))));
}

fn run(args: &[&str]) -> nibm::cli::RunReport {
    let mut argv = vec!["nibm"];
    argv.extend_from_slice(args);
    execute(&Cli::try_parse_from(argv).unwrap()).unwrap()
}

#[test]
fn capacity_of_shipped_feedback_channel() {
    let path = shipped("bsc_fb.json");
    let r = run(&["capacity", "--spec", path.to_str().unwrap()]);
    assert!((r.results[0].value - 1.0).abs() < 1e-6);
    assert!(r.ok);
}

#[test]
fn reports_are_reproducible_and_json_parses() {
    let path = shipped("net.json");
    let args = ["--format", "json", "gaussian-gap", "--spec", path.to_str().unwrap()];
    let a = run(&args).render(nibm::cli::Format::Json).unwrap();
    let b = run(&args).render(nibm::cli::Format::Json).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["ok"], serde_json::Value::Bool(true));

    let random = ["gaussian-gap", "--random", "4", "--count", "5", "--seed", "11"];
    assert_eq!(run(&random).render(nibm::cli::Format::Csv).unwrap(), run(&random).render(nibm::cli::Format::Csv).unwrap());
}

#[test]
fn cutset_of_shipped_state_channel() {
    let path = shipped("state_channel.json");
    let r = run(&["cutset", "--spec", path.to_str().unwrap()]);
    assert!((r.results[0].value - 0.5).abs() < 1e-12);
    let r = run(&["weakened", "--spec", path.to_str().unwrap(), "--kind", "weak"]);
    assert!((r.results[0].value - 0.75).abs() < 1e-12);
}
