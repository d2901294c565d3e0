use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erlang-stein")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_csv_is_stable_and_lf_terminated() {
    let a = run(&["table1"]);
    let b = run(&["table1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0], "n,R,mean_X,error,mean_X_rounded,error_rounded");
    assert!(lines[1].ends_with(",3.35,0.10"), "{}", lines[1]);
}

#[test]
fn table3_json_document() {
    let o = run(&["table3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "table3");
    assert_eq!(v["config"]["tail_tol"], 1e-14);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][3]["zeta_err_rounded"], "7.41e-2");
    assert!(v["suites"].is_array() && v["tolerances"].is_object());
    assert!(stdout(&o).contains("{\"R\":4.9989999999999998e2,\"abs_zeta\":"));
}

#[test]
fn verify_erlang_c_example_passes() {
    let o = run(&["verify", "--lambda", "4.9", "--n", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let suites = v["suites"].as_array().unwrap();
    assert!(suites.iter().all(|s| s["failed"] == 0));
    for name in ["moment_bounds", "density_sup", "gradient_wasserstein_C", "gradient_kolmogorov_C", "stein_identity"] {
        assert!(suites.iter().any(|s| s["name"] == name), "missing {name}");
    }
}

#[test]
fn verify_erlang_a_example_passes() {
    let o = run(&["verify", "--lambda", "10", "--mu", "1", "--n", "5", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("gradient_wasserstein_A") && text.contains("gradient_kolmogorov_A"));
    assert!(!text.lines().any(|l| l.ends_with(",fail")));
}

#[test]
fn unstable_input_is_a_validation_error() {
    let o = run(&["verify", "--lambda", "5", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unstable"));
}

#[test]
fn malformed_flags_are_validation_errors() {
    assert_eq!(run(&["distance", "--lambda", "abc", "--n", "5"]).status.code(), Some(1));
    assert_eq!(run(&["distance", "--lambda", "3"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--regime", "qed", "--beta", "1"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--regime", "qed", "--beta", "-1", "--sizes", "4"]).status.code(), Some(1));
    assert_eq!(run(&["table1", "--tail-tol", "2"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
}

#[test]
fn sweep_rows_sorted_by_load() {
    let o = run(&["sweep", "--regime", "qed", "--beta", "1", "--sizes", "100,4,25", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|x| x["R"].as_f64().unwrap()).collect();
    assert_eq!(r, vec![4.0, 25.0, 100.0]);
    assert_eq!(v["rows"][1]["n"], 30);
    assert_eq!(v["suites"][0]["failed"], 0);
}

#[test]
fn distance_writes_to_file() {
    let path = std::env::temp_dir().join(format!("erlang-stein-distance-{}.csv", std::process::id()));
    let o = run(&["distance", "--lambda", "45", "--n", "50", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("lambda,mu,n,alpha,regime,R,delta,zeta,d_w,d_k"));
    assert!(lines.next().unwrap().ends_with(",true,true"));
}
