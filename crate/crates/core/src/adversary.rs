//! Lower-bound instances and seeded fuzz instances.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{check_condition1, check_subadditivity};
use crate::metric::build_line_metric;
use crate::{Config, CostModel, Error, Instance, MetricSpace, Result};

fn exact_sqrt(s: usize) -> Result<usize> {
    let r = libm::sqrt(s as f64) as usize;
    (r.saturating_sub(1)..=r + 1)
        .find(|&k| k * k == s && k > 0)
        .ok_or(Error::NotPerfectSquare(s))
}

/// One point, `√|S|` single-commodity requests for a uniformly sampled
/// `S' ⊂ S` in sampled order.
fn thm1_sequence(s: usize, seed: u64, cost: CostModel) -> Result<Instance> {
    let k = exact_sqrt(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = sample(&mut rng, s, k);
    Instance::from_demands(
        MetricSpace::single_point(),
        cost,
        chosen.iter().map(|e| (0, Config::singleton(e))),
    )
}

/// Single-point lower-bound instance with `g(k) = ⌈k / √|S|⌉`. The optimum
/// opens one facility offering `S'` and pays 1.
pub fn gen_thm1(s: usize, seed: u64) -> Result<Instance> {
    let k = exact_sqrt(s)?;
    let g = (1..=s).map(|size| size.div_ceil(k) as f64).collect();
    Ok(thm1_sequence(s, seed, CostModel::size_based(g)?)?.with_opt_upper_bound(Some(1.0)))
}

/// Same sequence as [`gen_thm1`] with `g_x(k) = k^{x/2}`; the optimum pays at
/// most `g_x(√|S|) = |S|^{x/4}`.
pub fn gen_gx(s: usize, x: f64, seed: u64) -> Result<Instance> {
    let k = exact_sqrt(s)?;
    let cost = CostModel::poly(s, x)?;
    let bound = cost.size_cost(k).unwrap();
    Ok(thm1_sequence(s, seed, cost)?.with_opt_upper_bound(Some(bound)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Uniform coordinates on `[0, scale]`.
    Line,
    /// Euclidean distances of uniform points in `[0, scale]^2`.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKindParam {
    /// Per point `f^σ = base_m · (Σ_{e∈σ} w_e)^y`, one entry per `σ`.
    Table,
    /// `g(k) = base · k^y`, `y ∈ [0, 1]`.
    SizeBased,
    /// `k^{x/2}`, `x ∈ [0, 2]`.
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub num_points: usize,
    pub num_commodities: usize,
    pub num_requests: usize,
    pub metric: MetricKind,
    pub cost_kind: CostKindParam,
    pub max_set_size: usize,
    pub scale: f64,
}

impl GenParams {
    /// Small enough for the default oracle limits.
    pub fn oracle_solvable() -> Self {
        GenParams {
            num_points: 3,
            num_commodities: 3,
            num_requests: 6,
            metric: MetricKind::Line,
            cost_kind: CostKindParam::Table,
            max_set_size: 3,
            scale: 3.0,
        }
    }
}

const REJECTION_BUDGET: usize = 1000;

/// Seeded fuzz instance whose cost model is subadditive and satisfies the
/// per-commodity minimality condition (rejection sampled).
pub fn gen_random(params: &GenParams, seed: u64) -> Result<Instance> {
    let p = params;
    if p.num_points == 0 {
        return Err(Error::InvalidParams("num_points must be positive".into()));
    }
    if p.num_commodities == 0 || p.num_commodities > 64 {
        return Err(Error::CommodityCount(p.num_commodities));
    }
    if p.max_set_size == 0 {
        return Err(Error::InvalidParams("max_set_size must be positive".into()));
    }
    if p.cost_kind == CostKindParam::Table && p.num_commodities > 12 {
        return Err(Error::InvalidParams(format!(
            "table costs need |S| <= 12, got {}",
            p.num_commodities
        )));
    }
    if !(p.scale >= 0.0 && p.scale.is_finite()) {
        return Err(Error::InvalidParams(format!("scale {}", p.scale)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(p, &mut rng)?;
    let mut cost = None;
    for _ in 0..REJECTION_BUDGET {
        let c = random_cost(p, &mut rng)?;
        if check_condition1(&c, &metric)?.is_empty() && check_subadditivity(&c, &metric)?.is_empty() {
            cost = Some(c);
            break;
        }
    }
    let cost = cost.ok_or(Error::RejectionBudgetExhausted(REJECTION_BUDGET))?;
    let max_k = p.max_set_size.min(p.num_commodities);
    let demands: Vec<(usize, Config)> = (0..p.num_requests)
        .map(|_| {
            let point = rng.gen_range(0..p.num_points);
            (point, random_subset(p.num_commodities, max_k, &mut rng))
        })
        .collect();
    Instance::from_demands(metric, cost, demands)
}

fn random_metric<R: Rng>(p: &GenParams, rng: &mut R) -> Result<MetricSpace> {
    match p.metric {
        MetricKind::Line => {
            let coords: Vec<f64> = (0..p.num_points).map(|_| rng.gen::<f64>() * p.scale).collect();
            build_line_metric(&coords)
        }
        MetricKind::Matrix => {
            let pts: Vec<(f64, f64)> = (0..p.num_points)
                .map(|_| (rng.gen::<f64>() * p.scale, rng.gen::<f64>() * p.scale))
                .collect();
            let dist = pts
                .iter()
                .map(|a| pts.iter().map(|b| libm::hypot(a.0 - b.0, a.1 - b.1)).collect())
                .collect();
            MetricSpace::from_matrix_default_ids(dist)
        }
    }
}

fn random_cost<R: Rng>(p: &GenParams, rng: &mut R) -> Result<CostModel> {
    let s = p.num_commodities;
    match p.cost_kind {
        CostKindParam::Poly => CostModel::poly(s, rng.gen_range(0.0..=2.0)),
        CostKindParam::SizeBased => {
            let base = rng.gen_range(0.5..4.0);
            let y = rng.gen_range(0.0..=1.0);
            CostModel::size_based((1..=s).map(|k| base * libm::pow(k as f64, y)).collect())
        }
        CostKindParam::Table => {
            let weights: Vec<f64> = (0..s).map(|_| rng.gen_range(0.5..1.5)).collect();
            let mut entries = BTreeMap::new();
            for m in 0..p.num_points {
                let base = rng.gen_range(0.5..4.0);
                let y = rng.gen_range(0.3..=1.0);
                for sigma in Config::full(s).nonempty_subsets() {
                    let w: f64 = sigma.iter().map(|e| weights[e]).sum();
                    entries.insert((m, sigma), base * libm::pow(w, y));
                }
            }
            CostModel::table(s, entries)
        }
    }
}

/// Uniform over nonempty subsets of `0..s` with at most `max_k` elements.
fn random_subset<R: Rng>(s: usize, max_k: usize, rng: &mut R) -> Config {
    // size k with probability proportional to C(s, k)
    let mut binom = Vec::with_capacity(max_k);
    let mut c = 1.0f64;
    for k in 1..=max_k {
        c = c * (s - k + 1) as f64 / k as f64;
        binom.push(c);
    }
    let total: f64 = binom.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut k = max_k;
    for (i, &b) in binom.iter().enumerate() {
        if u < b {
            k = i + 1;
            break;
        }
        u -= b;
    }
    sample(rng, s, k).iter().collect()
}
