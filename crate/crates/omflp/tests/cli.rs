use std::fs;
use std::process::{Command, Output};

fn omflp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omflp"))
        .args(args)
        .env("OMFLP_THREADS", "1")
        .output()
        .unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_validate_opt_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let p = p.to_str().unwrap();
    assert!(omflp(&["gen", "random", "--seed", "9", "-o", p]).status.success());
    let v = omflp(&["validate", p]);
    assert!(v.status.success());
    assert_eq!(json(&v)["valid"], true);
    let o = omflp(&["opt", p]);
    assert!(o.status.success());
    let opt = json(&o)["cost"].as_f64().unwrap();
    for alg in ["pd", "rand", "per-commodity", "no-prediction"] {
        let r = omflp(&["run", "--algorithm", alg, "--seed", "4", p]);
        assert!(r.status.success(), "{alg}");
        assert!(json(&r)["cost"].as_f64().unwrap() >= opt - 1e-9);
    }
    let t = omflp(&["run", "--algorithm", "pd", "--trace", p]);
    assert!(!json(&t)["trace"].as_array().unwrap().is_empty());
    let t = omflp(&["run", "--algorithm", "rand", "--seed", "1", "--trace", p]);
    assert!(json(&t)["trace"][0]["coins"].is_array());
}

#[test]
fn opt_refusal_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    let p = p.to_str().unwrap();
    assert!(omflp(&["gen", "thm1", "--s", "64", "-o", p]).status.success());
    let o = omflp(&["opt", p]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["status"], "refused");
}

#[test]
fn invalid_instance_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(
        &p,
        r#"{"points":[0,1,2],"metric":{"kind":"matrix","dist":[[0,1,3],[1,0,1],[3,1,0]]},
           "num_commodities":1,"cost":{"kind":"poly","x":1},"requests":[]}"#,
    )
    .unwrap();
    let v = omflp(&["validate", p.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(json(&v)["valid"], false);
}

#[test]
fn unknown_algorithm_is_usage_error() {
    let o = omflp(&["run", "--algorithm", "greedy", "x.json"]);
    assert!(!o.status.success());
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"instances":[{"id":"t","kind":"thm1","s":16}],"algorithms":["no-prediction"],"output":"out.csv"}"#,
    )
    .unwrap();
    assert!(omflp(&["bench", "--config", cfg.to_str().unwrap()]).status.success());
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "t,no-prediction,0,4,1,false,4,4,16,");
}
