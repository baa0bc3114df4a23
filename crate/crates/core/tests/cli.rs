use std::path::PathBuf;
use std::process::{Command, Output};

fn proxvi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxvi")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("proxvi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_example_4_7_converges() {
    let out = proxvi(&["solve", "--instance", "example_4_7", "--rho", "0.35", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let summary = &v["trace"]["summary"];
    assert_eq!(summary["converged"], true);
    let theta = summary["theta"].as_f64().unwrap();
    assert!((theta - 0.2903).abs() < 1e-4);
}

#[test]
fn check_condition_reports_negative_radicand() {
    let out = proxvi(&["check-condition", "--instance", "example_4_7", "--rho", "3.8"]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["verdict"], "violated_radicand");
    assert!(v["radicand"].as_f64().unwrap() < 0.0);
}

#[test]
fn check_condition_human_itemizes_radicand() {
    let out = proxvi(&["check-condition", "--instance", "example_4_7", "--format", "human"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("radicand"), "{text}");
    assert!(text.contains("0.29"), "{text}");
}

#[test]
fn verify_example_3_3_fails_surjectivity() {
    let out = proxvi(&["verify", "--instance", "example_3_3"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    let failing: Vec<&str> = v["bundle"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["certificate"]["verdict"] == "fail")
        .map(|e| e["certificate"]["property"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|p| p.contains("surjective")), "{failing:?}");
}

#[test]
fn solve_non_surjective_exits_5_with_defect() {
    let out = proxvi(&["solve", "--instance", "example_3_3"]);
    assert_eq!(out.status.code(), Some(5));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("norm 2"), "{err}");
}

#[test]
fn parse_errors_exit_1_with_location() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\"dim\": 2,\n\"rho\": \"x\"}").unwrap();
    let out = proxvi(&["solve", "--instance-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));

    assert_eq!(proxvi(&["solve", "--instance", "nope"]).status.code(), Some(1));
    assert_eq!(proxvi(&["solve", "--instance", "example_4_7", "--rho", "abc"]).status.code(), Some(1));
    assert_eq!(proxvi(&["solve"]).status.code(), Some(1));
    assert_eq!(proxvi(&["solve", "--instance", "example_4_7", "--instance-file", "x.json"]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_2() {
    let out = proxvi(&["solve", "--instance", "example_4_7", "--max-iters", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_export_is_deterministic_and_versioned() {
    let a = proxvi(&["trace-export", "--instance", "example_4_7", "--errors", "geometric"]);
    let b = proxvi(&["trace-export", "--instance", "example_4_7", "--errors", "geometric"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "schema,n,step,ratio,residual,theta_n,error_norm,u_1,u_2");
    assert!(lines.next().unwrap().starts_with("proxvi-trace/1,0,"));
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("verify.json");
    let to_file = proxvi(&["verify", "--instance", "example_3_2", "--seed", "7", "--output", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let direct = proxvi(&["verify", "--instance", "example_3_2", "--seed", "7"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn list_instances_names_every_builtin() {
    let out = proxvi(&["list-instances"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["example_3_2", "example_3_3", "example_4_7", "reduction_sum_inclusion"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn exported_instance_file_round_trips_through_cli() {
    let path = scratch("ex47.json");
    let file = proxvi::instance_file::InstanceFile::from_instance(Some("ex47"), &proxvi::instances::example_4_7().instance).unwrap();
    std::fs::write(&path, file.to_json().unwrap()).unwrap();
    let from_file = json(&proxvi(&["solve", "--instance-file", path.to_str().unwrap()]));
    let builtin = json(&proxvi(&["solve", "--instance", "example_4_7"]));
    assert_eq!(from_file["trace"], builtin["trace"]);
}
