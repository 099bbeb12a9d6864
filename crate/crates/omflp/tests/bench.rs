use std::path::Path;

use omflp::bench::{
    estimate_ratio, render_csv, run_experiment, stats, trial_seeds, Algorithm, ExperimentConfig, OptSource, CSV_HEADER,
};
use omflp::format::parse_instance;
use omflp_core::adversary::gen_thm1;
use omflp_core::oracle::harmonic;

fn config(json: &str) -> ExperimentConfig {
    serde_json::from_str(json).unwrap()
}

#[test]
fn pd_matches_opt_on_single_facility() {
    let inst = parse_instance(include_str!("data/minimal.json")).unwrap();
    let (s, opt) = estimate_ratio(&inst, Algorithm::Pd, 10, 0).unwrap();
    assert_eq!(opt, OptSource::Exact(5.0));
    assert_eq!((s.mean, s.stddev, s.max), (1.0, 0.0, 1.0));
}

#[test]
fn no_prediction_against_lower_bound() {
    let inst = gen_thm1(16, 0).unwrap();
    let (s, opt) = estimate_ratio(&inst, Algorithm::NoPrediction, 5, 0).unwrap();
    assert_eq!(opt, OptSource::Bound(1.0));
    assert_eq!(s.mean, 4.0);
}

#[test]
fn pd_below_ceiling_on_lower_bound_instance() {
    let inst = gen_thm1(16, 0).unwrap();
    let (s, _) = estimate_ratio(&inst, Algorithm::Pd, 1, 0).unwrap();
    assert!(s.max <= 15.0 * 4.0 * harmonic(4));
}

#[test]
fn missing_opt_source_is_error() {
    let inst = gen_thm1(16, 0).unwrap().with_opt_upper_bound(None);
    assert!(estimate_ratio(&inst, Algorithm::Pd, 1, 0).is_err());
}

#[test]
fn seeds_and_stats() {
    assert_eq!(trial_seeds(Algorithm::Rand, 3, 10), vec![10, 11, 12]);
    assert_eq!(trial_seeds(Algorithm::Pd, 3, 10), vec![10]);
    let s = stats(&[1.0, 2.0, 3.0]);
    assert_eq!((s.mean, s.stddev, s.max), (2.0, 1.0, 3.0));
}

#[test]
fn no_algorithms_gives_header_only() {
    let cfg = config(r#"{"instances":[{"id":"a","kind":"thm1","s":4}],"algorithms":[]}"#);
    let out = run_experiment(&cfg, Path::new("."), 1).unwrap();
    assert_eq!(out.csv, format!("{CSV_HEADER}\n"));
    assert_eq!(render_csv(&[]), out.csv);
}

#[test]
fn unknown_algorithm_and_bad_config() {
    let cfg = config(r#"{"instances":[],"algorithms":["greedy"]}"#);
    assert!(run_experiment(&cfg, Path::new("."), 1).is_err());
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"instances":[{"id":"a","kind":"nope"}],"algorithms":[]}"#).is_err());
    let cfg = config(r#"{"instances":[{"id":"a","kind":"file","path":"missing.json"}],"algorithms":["pd"]}"#);
    assert!(run_experiment(&cfg, Path::new("."), 1).is_err());
}

#[test]
fn output_independent_of_threads_and_repeatable() {
    let cfg = config(
        r#"{"instances":[
            {"id":"t4","kind":"thm1","s":4,"seed":1},
            {"id":"g","kind":"gx","s":16,"x":1,"seed":2},
            {"id":"r","kind":"random","seed":5}],
          "algorithms":["pd","rand","per-commodity","no-prediction"],"trials":20,"base_seed":3}"#,
    );
    let a = run_experiment(&cfg, Path::new("."), 1).unwrap();
    let b = run_experiment(&cfg, Path::new("."), 4).unwrap();
    let c = run_experiment(&cfg, Path::new("."), 1).unwrap();
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.csv, c.csv);
    assert_eq!(a.violations().count(), 0);
    let rows = a.csv.lines().count() - 1;
    assert_eq!(rows, 3 * (1 + 20 + 20 + 1) + 3 * 4 * 3);
    for t in a.trials.iter().filter(|t| t.opt_is_exact) {
        assert!(t.ratio >= 1.0 - 1e-9);
    }
}

#[test]
fn timing_fills_runtime_column() {
    let cfg = config(r#"{"instances":[{"id":"a","kind":"thm1","s":4}],"algorithms":["pd"],"timing":true}"#);
    let out = run_experiment(&cfg, Path::new("."), 1).unwrap();
    let row = out.csv.lines().nth(1).unwrap();
    assert!(!row.ends_with(','));
}
