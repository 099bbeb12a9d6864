use omflp::format::{parse_instance, parse_number, serialize_instance, FormatError, SolutionDoc};
use omflp_core::adversary::{gen_gx, gen_random, gen_thm1, CostKindParam, GenParams, MetricKind};
use omflp_core::pd::run_pd;
use omflp_core::{Config, CostModel};
use proptest::prelude::*;

const MINIMAL: &str = include_str!("data/minimal.json");
const RATIONAL: &str = include_str!("data/rational.json");

#[test]
fn minimal_document() {
    let inst = parse_instance(MINIMAL).unwrap();
    assert_eq!(inst.num_requests(), 1);
    assert_eq!(inst.num_points(), 1);
    assert_eq!(inst.cost().facility_cost(0, Config::singleton(0)).unwrap(), 5.0);
    assert_eq!(inst.metric().point_ids(), ["depot"]);
}

#[test]
fn rational_and_decimal_literals() {
    let inst = parse_instance(RATIONAL).unwrap();
    assert_eq!(inst.metric().dist(0, 1), 1.0 / 3.0);
    assert_eq!(inst.metric().dist(0, 2), 2.5);
    assert_eq!(inst.cost(), &CostModel::size_based(vec![1.5, 2.0]).unwrap());
    assert_eq!(inst.known_opt_upper_bound(), Some(3.5));
    assert_eq!(inst.requests()[1].commodities, Config::from_indices([0, 1]));
    assert_eq!(parse_number(" -3/4 ").unwrap(), -0.75);
    assert!(parse_number("1/0").is_err());
    assert!(parse_number("abc").is_err());
}

#[test]
fn commodity_index_equal_to_s_is_rejected() {
    let doc = MINIMAL.replace(r#""commodities": [0]"#, r#""commodities": [1]"#);
    assert!(matches!(
        parse_instance(&doc),
        Err(FormatError::Commodity { commodity: 1, num_commodities: 1 })
    ));
}

#[test]
fn unknown_point_and_cost_kind_are_rejected() {
    let doc = MINIMAL.replace(r#"{"point": "depot", "commodities""#, r#"{"point": "nowhere", "commodities""#);
    assert!(matches!(parse_instance(&doc), Err(FormatError::UnknownPoint(p)) if p == "nowhere"));
    let doc = MINIMAL.replace(r#""kind": "table""#, r#""kind": "banded""#);
    let err = parse_instance(&doc).unwrap_err();
    assert!(matches!(err, FormatError::Json(_)));
    assert!(err.to_string().contains("banded"));
}

#[test]
fn metric_axioms_are_checked_after_structure() {
    let doc = r#"{"points":[0,1,2],"metric":{"kind":"matrix","dist":[[0,1,3],[1,0,1],[3,1,0]]},
        "num_commodities":1,"cost":{"kind":"poly","x":1},"requests":[]}"#;
    assert!(matches!(parse_instance(doc), Err(FormatError::Metric(_))));
    let ragged = r#"{"points":[0,1],"metric":{"kind":"matrix","dist":[[0,1],[1]]},
        "num_commodities":1,"cost":{"kind":"poly","x":1},"requests":[]}"#;
    assert!(matches!(parse_instance(ragged), Err(FormatError::Model(_))));
}

#[test]
fn malformed_documents_are_rejected() {
    assert!(parse_instance("{").is_err());
    assert!(parse_instance(r#"{"points":[]}"#).is_err());
    let missing = MINIMAL.replace(r#""cost": "5""#, r#""cost": "5", "extra": 1"#);
    assert!(parse_instance(&missing).is_err());
}

#[test]
fn generated_lower_bound_instances_round_trip() {
    for s in [4, 16, 64] {
        let inst = gen_thm1(s, 11).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        let inst = gen_gx(s, 1.0, 11).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }
}

#[test]
fn solution_document_round_trips() {
    let inst = parse_instance(RATIONAL).unwrap();
    let (sol, _) = run_pd(&inst);
    let doc = SolutionDoc::from_solution(&inst, &sol);
    let text = serde_json::to_string(&doc).unwrap();
    let back: SolutionDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_solution(&inst).unwrap(), sol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_instances_round_trip(
        seed in any::<u64>(), m in 1usize..6, s in 1usize..5, n in 0usize..10,
        line in any::<bool>(), ck in 0usize..3
    ) {
        let p = GenParams {
            num_points: m,
            num_commodities: s,
            num_requests: n,
            metric: if line { MetricKind::Line } else { MetricKind::Matrix },
            cost_kind: [CostKindParam::Table, CostKindParam::SizeBased, CostKindParam::Poly][ck],
            max_set_size: s,
            scale: 7.0,
        };
        let inst = gen_random(&p, seed).unwrap();
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst.clone());
        prop_assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }
}
