use omflp_core::adversary::{gen_random, gen_thm1, CostKindParam, GenParams, MetricKind};
use omflp_core::baselines::run_per_commodity;
use omflp_core::metric::build_line_metric;
use omflp_core::randomized::{
    build_classes, compute_budgets, run_rand, run_rand_with, DistanceMode, RandState, Tau,
};
use omflp_core::solution::{check_feasible, evaluate_cost};
use omflp_core::{Config, CostModel, Instance};

fn fuzz(seed: u64) -> Instance {
    let s = 1 + (seed % 4) as usize;
    let p = GenParams {
        num_points: 1 + (seed % 5) as usize,
        num_commodities: s,
        num_requests: (seed % 11) as usize,
        metric: if seed.is_multiple_of(2) { MetricKind::Line } else { MetricKind::Matrix },
        cost_kind: [CostKindParam::Table, CostKindParam::SizeBased, CostKindParam::Poly][(seed % 3) as usize],
        max_set_size: s,
        scale: 4.0,
    };
    gen_random(&p, seed).unwrap()
}

#[test]
fn empty_sequence() {
    let inst = Instance::new(build_line_metric(&[0.0, 1.0]).unwrap(), CostModel::poly(2, 1.0).unwrap(), vec![]).unwrap();
    let run = run_rand(&inst, 0).unwrap();
    assert!(run.solution.facilities.is_empty());
    assert_eq!(evaluate_cost(&inst, &run.solution).unwrap().total, 0.0);
}

#[test]
fn always_feasible_and_telescoping() {
    for seed in 0..150 {
        let inst = fuzz(seed);
        for mode in [DistanceMode::Cumulative, DistanceMode::Literal] {
            let run = run_rand_with(&inst, seed * 7 + 1, mode).unwrap();
            assert!(check_feasible(&inst, &run.solution).is_empty(), "seed {seed}");
            for t in &run.trace {
                for c in &t.coins {
                    assert!((0.0..=1.0).contains(&c.p));
                }
            }
            if mode == DistanceMode::Cumulative {
                for t in &run.trace {
                    for tel in &t.telescopes {
                        assert!((tel.sum - tel.closed).abs() <= 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn expected_construction_matches_budget() {
    for seed in 0..80 {
        let inst = fuzz(seed);
        let run = run_rand(&inst, seed).unwrap();
        let classes = build_classes(&inst, DistanceMode::Cumulative).unwrap();
        for t in &run.trace {
            let d0 = t.budgets.z.min(t.budgets.x);
            let point = inst.requests()[t.request].point;
            let mut large = 0.0;
            let mut small = 0.0;
            for c in &t.coins {
                let table = classes.table(c.tau);
                let charge = c.p_raw * table.values[c.class - 1];
                match c.tau {
                    Tau::Large => large += charge,
                    Tau::Small(_) => small += charge,
                }
            }
            let residual = *classes.large.dist.last().unwrap().get(point).unwrap();
            assert!((large - (d0 - residual)).abs() <= 1e-9);
            assert!(small <= d0 + 1e-9);
        }
    }
}

#[test]
fn cumulative_distances_non_increasing() {
    for seed in 0..40 {
        let inst = fuzz(seed);
        let classes = build_classes(&inst, DistanceMode::Cumulative).unwrap();
        for table in classes.small.iter().chain([&classes.large]) {
            for i in 1..table.len() {
                assert!(2.0 * table.values[i - 1] <= table.values[i]);
                for m in 0..inst.num_points() {
                    assert!(table.dist[i][m] <= table.dist[i - 1][m]);
                }
            }
        }
    }
}

/// X(r,e) and Z(r) never exceed any concrete way of serving with rounded
/// costs: an open facility, or a point's rounded cost plus its distance.
#[test]
fn budgets_below_brute_force_options() {
    for seed in 0..40 {
        let inst = fuzz(seed);
        let classes = build_classes(&inst, DistanceMode::Cumulative).unwrap();
        let mut state = RandState::new(&inst, seed);
        for r in inst.requests() {
            let b = compute_budgets(&state, &classes, &inst, r);
            for &(e, xe) in &b.x_map {
                for m in 0..inst.num_points() {
                    let f = inst.cost().facility_cost(m, Config::singleton(e)).unwrap();
                    let rounded = omflp_core::randomized::floor_pow2(f);
                    assert!(xe <= rounded + inst.dist(m, r) + 1e-12);
                }
                for f in state.solution().facilities.iter().filter(|f| f.config.contains(e)) {
                    assert!(xe <= inst.dist(f.point, r) + 1e-12);
                }
            }
            for m in 0..inst.num_points() {
                let f = inst.cost().facility_cost(m, inst.full_config()).unwrap();
                assert!(b.z <= omflp_core::randomized::floor_pow2(f) + inst.dist(m, r) + 1e-12);
            }
            let mut rng = state.rng_for(r);
            omflp_core::randomized::step_rand(&mut state, &classes, &inst, r, &mut rng);
        }
    }
}

#[test]
fn reproducible_per_seed() {
    let inst = fuzz(17);
    assert_eq!(run_rand(&inst, 5).unwrap(), run_rand(&inst, 5).unwrap());
}

#[test]
fn thm1_mean_cost_at_least_opt() {
    let inst = gen_thm1(16, 3).unwrap();
    let trials = 1000;
    let mean: f64 = (0..trials)
        .map(|s| evaluate_cost(&inst, &run_rand(&inst, s).unwrap().solution).unwrap().total)
        .sum::<f64>()
        / trials as f64;
    assert!(mean.is_finite() && mean >= 1.0);
}

#[test]
fn per_commodity_on_one_commodity_matches_rand() {
    for seed in 0..20 {
        let p = GenParams {
            num_commodities: 1,
            max_set_size: 1,
            num_requests: 8,
            ..GenParams::oracle_solvable()
        };
        let inst = gen_random(&p, seed).unwrap();
        let a = run_per_commodity(&inst, seed).unwrap();
        let b = run_rand(&inst, seed).unwrap().solution;
        assert_eq!(
            evaluate_cost(&inst, &a).unwrap().total,
            evaluate_cost(&inst, &b).unwrap().total
        );
        for seed2 in 0..3 {
            let s = run_per_commodity(&fuzz(seed * 3 + seed2), seed2).unwrap();
            assert!(check_feasible(&fuzz(seed * 3 + seed2), &s).is_empty());
        }
    }
}
