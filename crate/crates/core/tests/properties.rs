use omflp_core::adversary::{gen_random, CostKindParam, GenParams, MetricKind};
use omflp_core::cost::{check_condition1, check_subadditivity};
use omflp_core::pd::run_pd;
use omflp_core::randomized::run_rand;
use omflp_core::solution::{check_feasible, evaluate_cost, lift_solution, split_requests};
use omflp_core::{Assignment, Config, Solution};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (GenParams, u64)> {
    (1usize..=5, 1usize..=4, 0usize..=10, any::<bool>(), 0usize..3, any::<u64>()).prop_map(
        |(m, s, n, line, ck, seed)| {
            let p = GenParams {
                num_points: m,
                num_commodities: s,
                num_requests: n,
                metric: if line { MetricKind::Line } else { MetricKind::Matrix },
                cost_kind: [CostKindParam::Table, CostKindParam::SizeBased, CostKindParam::Poly][ck],
                max_set_size: s,
                scale: 5.0,
            };
            (p, seed)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_pass_validation((p, seed) in params()) {
        let inst = gen_random(&p, seed).unwrap();
        prop_assert!(inst.metric().validate().is_empty());
        prop_assert!(check_condition1(inst.cost(), inst.metric()).unwrap().is_empty());
        prop_assert!(check_subadditivity(inst.cost(), inst.metric()).unwrap().is_empty());
        prop_assert_eq!(inst.num_requests(), p.num_requests);
    }

    #[test]
    fn cost_ignores_facility_and_connection_order((p, seed) in params()) {
        let inst = gen_random(&p, seed).unwrap();
        let sol = run_rand(&inst, seed).unwrap().solution;
        let mut shuffled = sol.clone();
        shuffled.facilities.reverse();
        shuffled.assignments.reverse();
        for a in &mut shuffled.assignments {
            a.connections.reverse();
        }
        let a = evaluate_cost(&inst, &sol).unwrap().total;
        let b = evaluate_cost(&inst, &shuffled).unwrap().total;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    /// Replacing all facilities at one point by their union never costs more.
    #[test]
    fn merging_colocated_facilities_does_not_increase_cost((p, seed) in params()) {
        let inst = gen_random(&p, seed).unwrap();
        let (sol, _) = run_pd(&inst);
        let before = evaluate_cost(&inst, &sol).unwrap().total;
        let mut merged = Solution::default();
        let mut id_of_point = std::collections::BTreeMap::new();
        for m in 0..inst.num_points() {
            let cfg = sol.facilities.iter().filter(|f| f.point == m).fold(Config::EMPTY, |c, f| c.union(f.config));
            if !cfg.is_empty() {
                let cost = inst.cost().facility_cost(m, cfg).unwrap();
                id_of_point.insert(m, merged.open(m, cfg, cost));
            }
        }
        for asg in &sol.assignments {
            let mut a = Assignment::new(asg.request_index);
            for &(fid, cov) in &asg.connections {
                a.connect(id_of_point[&sol.facility(fid).unwrap().point], cov);
            }
            merged.assignments.push(a);
        }
        prop_assert!(check_feasible(&inst, &merged).is_empty());
        prop_assert!(evaluate_cost(&inst, &merged).unwrap().total <= before + 1e-9);
    }

    #[test]
    fn lifted_solution_is_feasible_and_no_cheaper((p, seed) in params()) {
        let inst = gen_random(&p, seed).unwrap();
        let (sol, _) = run_pd(&inst);
        let split = split_requests(&inst);
        let lifted = lift_solution(&inst, &sol);
        prop_assert!(check_feasible(&split, &lifted).is_empty());
        let a = evaluate_cost(&inst, &sol).unwrap().total;
        let b = evaluate_cost(&split, &lifted).unwrap().total;
        prop_assert!(b + 1e-9 >= a);
        prop_assert_eq!(split.num_requests(), inst.demand_count());
    }
}
