use omflp_core::ordered_cover::{greedy_cover, random_cordered, validate_cordered, weight_bound};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn random_instances_are_valid_and_covered_within_bound(
        seed in any::<u64>(), n in 1usize..=50, c in 1.0f64..100.0
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_cordered(n, c, &mut rng);
        prop_assert!(validate_cordered(&inst).is_empty());
        let res = greedy_cover(&inst).unwrap();
        prop_assert!(res.total_weight <= weight_bound(c, n) + 1e-9);
        let mut covered: Vec<usize> = res.sets.iter().flat_map(|s| s.covers.clone()).collect();
        covered.sort_unstable();
        prop_assert_eq!(covered, (0..n).collect::<Vec<_>>());
        for round in &res.rounds {
            prop_assert!(round.remainder_valid);
            prop_assert!(round.weight / round.covered as f64 <= 2.0 * c / round.len as f64 + 1e-9);
        }
    }
}

#[test]
fn weights_sum_to_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = rng.gen_range(1..30);
        let inst = random_cordered(n, 2.5, &mut rng);
        let res = greedy_cover(&inst).unwrap();
        let sum: f64 = res.sets.iter().map(|s| s.weight).sum();
        assert!((sum - res.total_weight).abs() < 1e-9);
    }
}
