//! Randomized online algorithm over power-of-two cost classes.
//!
//! Facility costs of each configuration `τ ∈ {{e}} ∪ {S}` are rounded down
//! to powers of two and grouped into classes `C_1 < C_2 < ..`. A request
//! computes its budgets
//!
//! * `X(r,e) = min{ d(F(e),r), min_i C_i^{e} + d(C_i^{e}, r) }`, `X(r) = Σ_e X(r,e)`,
//! * `Z(r) = min{ d(F̂,r), min_i C_i^S + d(C_i^S, r) }`,
//!
//! and opens a class-`i` facility closest to it with probability
//! `(d(C_{i-1},r) - d(C_i,r)) / C_i`, scaled by `X(r,e)/X(r)` for small
//! facilities, where `d(C_0, r) = min{Z(r), X(r)}`. The request then
//! connects by the cheaper of one large facility or per-commodity
//! facilities.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Assignment, Config, Instance, Request, Result, Solution};

/// How `d(C_i, m)` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Distance to the nearest point of class at most `i`. Differences
    /// between consecutive classes are never negative.
    #[default]
    Cumulative,
    /// Distance to the nearest point of class exactly `i`.
    Literal,
}

/// `2^⌊log2 f⌋` for positive finite `f`.
pub fn floor_pow2(f: f64) -> f64 {
    debug_assert!(f > 0.0 && f.is_finite());
    let mut p = libm::exp2(libm::floor(libm::log2(f)));
    while p > f {
        p /= 2.0;
    }
    while p * 2.0 <= f {
        p *= 2.0;
    }
    p
}

/// Classes of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTable {
    /// Distinct rounded costs, increasing.
    pub values: Vec<f64>,
    /// Class index (0-based) of every point.
    pub point_class: Vec<usize>,
    /// `dist[i][m] = d(C_{i+1}, m)`.
    pub dist: Vec<Vec<f64>>,
    /// The point realizing `dist[i][m]` (lowest index on ties).
    pub nearest: Vec<Vec<usize>>,
}

impl ClassTable {
    fn build(inst: &Instance, costs: &[f64], mode: DistanceMode) -> Self {
        let rounded: Vec<f64> = costs.iter().map(|&f| floor_pow2(f)).collect();
        let mut values = rounded.clone();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let point_class: Vec<usize> = rounded
            .iter()
            .map(|v| values.iter().position(|w| w == v).unwrap())
            .collect();
        let n_points = inst.num_points();
        let mut dist = Vec::with_capacity(values.len());
        let mut nearest = Vec::with_capacity(values.len());
        for i in 0..values.len() {
            let member = |p: usize| match mode {
                DistanceMode::Cumulative => point_class[p] <= i,
                DistanceMode::Literal => point_class[p] == i,
            };
            let mut row = Vec::with_capacity(n_points);
            let mut arg = Vec::with_capacity(n_points);
            for m in 0..n_points {
                let (d, p) = (0..n_points)
                    .filter(|&p| member(p))
                    .map(|p| (inst.metric().dist(p, m), p))
                    .fold((f64::INFINITY, usize::MAX), |best, cand| {
                        if cand.0 < best.0 {
                            cand
                        } else {
                            best
                        }
                    });
                row.push(d);
                arg.push(p);
            }
            dist.push(row);
            nearest.push(arg);
        }
        ClassTable {
            values,
            point_class,
            dist,
            nearest,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `min_i C_i + d(C_i, m)` with the class and point realizing it.
    pub fn cheapest(&self, m: usize) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.len() {
            let v = self.values[i] + self.dist[i][m];
            if v < best.0 {
                best = (v, i, self.nearest[i][m]);
            }
        }
        best
    }
}

/// Class tables for every singleton configuration and for `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassIndex {
    pub mode: DistanceMode,
    pub small: Vec<ClassTable>,
    pub large: ClassTable,
}

impl ClassIndex {
    pub fn table(&self, tau: Tau) -> &ClassTable {
        match tau {
            Tau::Small(e) => &self.small[e],
            Tau::Large => &self.large,
        }
    }
}

pub fn build_classes(inst: &Instance, mode: DistanceMode) -> Result<ClassIndex> {
    let costs_of = |config: Config| -> Result<Vec<f64>> {
        (0..inst.num_points())
            .map(|m| inst.cost().facility_cost(m, config))
            .collect()
    };
    let small = (0..inst.num_commodities())
        .map(|e| Ok(ClassTable::build(inst, &costs_of(Config::singleton(e))?, mode)))
        .collect::<Result<Vec<_>>>()?;
    let large = ClassTable::build(inst, &costs_of(inst.full_config())?, mode);
    Ok(ClassIndex { mode, small, large })
}

/// Configuration a coin is flipped for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Small(usize),
    Large,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Budgets {
    /// `(e, X(r,e))` for `e ∈ s_r`, increasing `e`.
    pub x_map: Vec<(usize, f64)>,
    pub x: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coin {
    pub tau: Tau,
    /// 1-based class index.
    pub class: usize,
    pub p_raw: f64,
    pub p: f64,
    pub outcome: bool,
    /// Facility opened on success, `None` when skipped or failed.
    pub opened: Option<usize>,
}

/// Telescoped distance drops for one configuration of one request:
/// `Σ_i (d(C_{i-1},r) - d(C_i,r))` and `d(C_0,r) - d(C_last,r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Telescope {
    pub tau: Tau,
    pub sum: f64,
    pub closed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Large,
    Small,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestTrace {
    pub request: usize,
    pub budgets: Budgets,
    pub coins: Vec<Coin>,
    /// Facilities opened deterministically because no facility offered a
    /// demanded commodity after the coin flips.
    pub fallback: Vec<usize>,
    pub route: Route,
    pub connections: Vec<(usize, Config)>,
    pub telescopes: Vec<Telescope>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandRun {
    pub seed: u64,
    pub solution: Solution,
    pub trace: Vec<RequestTrace>,
    /// Coins whose raw probability fell outside `[0, 1]`.
    pub clamped: usize,
}

/// Open facilities and the seed; grows monotonically.
#[derive(Debug, Clone)]
pub struct RandState {
    seed: u64,
    full: Config,
    solution: Solution,
    clamped: usize,
}

impl RandState {
    pub fn new(inst: &Instance, seed: u64) -> Self {
        RandState {
            seed,
            full: inst.full_config(),
            solution: Solution::default(),
            clamped: 0,
        }
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    /// Independent stream per request, keyed by its arrival index.
    pub fn rng_for(&self, r: &Request) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(r.arrival_index as u64);
        rng
    }

    fn nearest_where(
        &self,
        inst: &Instance,
        point: usize,
        pred: impl Fn(Config) -> bool,
    ) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for f in self.solution.facilities.iter().filter(|f| pred(f.config)) {
            let d = inst.metric().dist(f.point, point);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, f.id));
            }
        }
        best
    }

    /// Nearest facility offering `e`.
    pub fn nearest_offering(&self, inst: &Instance, point: usize, e: usize) -> Option<(f64, usize)> {
        self.nearest_where(inst, point, |c| c.contains(e))
    }

    pub fn nearest_large(&self, inst: &Instance, point: usize) -> Option<(f64, usize)> {
        let full = self.full;
        self.nearest_where(inst, point, |c| c == full)
    }

    fn covered_at(&self, point: usize, config: Config) -> bool {
        self.solution
            .facilities
            .iter()
            .any(|f| f.point == point && config.is_subset(f.config))
    }

    /// Opens unless a facility at `point` already offers a superset.
    fn open_unless_covered(&mut self, inst: &Instance, point: usize, config: Config) -> Option<usize> {
        if self.covered_at(point, config) {
            return None;
        }
        let cost = inst
            .cost()
            .facility_cost(point, config)
            .expect("class tables built from these costs");
        Some(self.solution.open(point, config, cost))
    }
}

pub fn compute_budgets(state: &RandState, classes: &ClassIndex, inst: &Instance, r: &Request) -> Budgets {
    let x_map: Vec<(usize, f64)> = r
        .commodities
        .iter()
        .map(|e| {
            let existing = state
                .nearest_offering(inst, r.point, e)
                .map_or(f64::INFINITY, |(d, _)| d);
            (e, existing.min(classes.small[e].cheapest(r.point).0))
        })
        .collect();
    let x = x_map.iter().map(|&(_, v)| v).sum();
    let existing = state
        .nearest_large(inst, r.point)
        .map_or(f64::INFINITY, |(d, _)| d);
    let z = existing.min(classes.large.cheapest(r.point).0);
    Budgets { x_map, x, z }
}

/// Raw per-class probabilities `(d(C_{i-1}) - d(C_i)) / C_i · share` for
/// one configuration, with the telescoped sums.
fn class_probabilities(table: &ClassTable, point: usize, d0: f64, share: f64) -> (Vec<f64>, Telescope) {
    let mut prev = d0;
    let mut sum = 0.0;
    let mut probs = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        let cur = table.dist[i][point];
        let delta = prev - cur;
        sum += delta;
        probs.push(delta / table.values[i] * share);
        prev = cur;
    }
    let closed = d0 - table.dist.last().map_or(d0, |row| row[point]);
    (
        probs,
        Telescope {
            tau: Tau::Large,
            sum,
            closed,
        },
    )
}

/// Handles one arriving request: coin flips, feasibility fallback and
/// connection.
pub fn step_rand<R: Rng + ?Sized>(
    state: &mut RandState,
    classes: &ClassIndex,
    inst: &Instance,
    r: &Request,
    rng: &mut R,
) -> RequestTrace {
    let budgets = compute_budgets(state, classes, inst, r);
    let d0 = budgets.z.min(budgets.x);
    let k = r.commodities.len() as f64;

    let mut plans: Vec<(Tau, Vec<f64>)> = Vec::new();
    let mut telescopes = Vec::new();
    for &(e, xe) in &budgets.x_map {
        let share = if budgets.x > 0.0 { xe / budgets.x } else { 1.0 / k };
        let (probs, mut tel) = class_probabilities(&classes.small[e], r.point, d0, share);
        tel.tau = Tau::Small(e);
        telescopes.push(tel);
        plans.push((Tau::Small(e), probs));
    }
    let (probs, tel) = class_probabilities(&classes.large, r.point, d0, 1.0);
    telescopes.push(tel);
    plans.push((Tau::Large, probs));

    let rounds = plans.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let mut coins = Vec::new();
    for i in 0..rounds {
        for (tau, probs) in &plans {
            let Some(&p_raw) = probs.get(i) else { continue };
            let p = p_raw.clamp(0.0, 1.0);
            if p != p_raw {
                state.clamped += 1;
            }
            let outcome = rng.gen::<f64>() < p;
            let mut opened = None;
            if outcome {
                let table = classes.table(*tau);
                let point = table.nearest[i][r.point];
                let config = match tau {
                    Tau::Small(e) => Config::singleton(*e),
                    Tau::Large => inst.full_config(),
                };
                opened = state.open_unless_covered(inst, point, config);
            }
            coins.push(Coin {
                tau: *tau,
                class: i + 1,
                p_raw,
                p,
                outcome,
                opened,
            });
        }
    }

    let mut fallback = Vec::new();
    for e in r.commodities.iter() {
        if state.nearest_offering(inst, r.point, e).is_none() {
            let (_, _, point) = classes.small[e].cheapest(r.point);
            let id = state
                .open_unless_covered(inst, point, Config::singleton(e))
                .expect("no facility offers e");
            fallback.push(id);
        }
    }

    // per-commodity route, each distinct facility paid once
    let mut small = Assignment::new(r.arrival_index);
    for e in r.commodities.iter() {
        let (_, fid) = state.nearest_offering(inst, r.point, e).expect("fallback ran");
        small.connect(fid, Config::singleton(e));
    }
    let small_cost: f64 = small
        .connections
        .iter()
        .map(|&(fid, _)| inst.dist(state.solution.facility(fid).unwrap().point, r))
        .sum();
    let (route, asg) = match state.nearest_large(inst, r.point) {
        Some((d, fid)) if d <= small_cost => {
            let mut a = Assignment::new(r.arrival_index);
            a.connect(fid, r.commodities);
            (Route::Large, a)
        }
        _ => (Route::Small, small),
    };
    let connections = asg.connections.clone();
    state.solution.assignments.push(asg);

    RequestTrace {
        request: r.arrival_index,
        budgets,
        coins,
        fallback,
        route,
        connections,
        telescopes,
    }
}

/// Runs the algorithm with cumulative class distances.
pub fn run_rand(inst: &Instance, seed: u64) -> Result<RandRun> {
    run_rand_with(inst, seed, DistanceMode::Cumulative)
}

pub fn run_rand_with(inst: &Instance, seed: u64, mode: DistanceMode) -> Result<RandRun> {
    let classes = build_classes(inst, mode)?;
    let mut state = RandState::new(inst, seed);
    let mut trace = Vec::with_capacity(inst.num_requests());
    for r in inst.requests() {
        let mut rng = state.rng_for(r);
        trace.push(step_rand(&mut state, &classes, inst, r, &mut rng));
    }
    Ok(RandRun {
        seed,
        solution: state.solution,
        trace,
        clamped: state.clamped,
    })
}
