//! Deterministic primal-dual online algorithm.
//!
//! When a request `r` arrives, the duals `a_re` of its unserved commodities
//! are raised simultaneously at unit rate until one of four constraints
//! becomes tight:
//!
//! 1. `a_re <= d(F(e), r)`: connect `e` to an existing facility offering it.
//! 2. `Σ_{e∈s_r} a_re <= d(F̂, r)`: connect all of `r` to an open large
//!    facility.
//! 3. `(a_re - d(m,r))+ + Φ(e,m) <= f_m^{e}`: open a temporary small
//!    facility `({e}, m)`.
//! 4. `(Σ_{e∈s_r} a_re - d(m,r))+ + Ψ(m) <= f_m^S`: open a large facility
//!    at `m`.
//!
//! `Φ` and `Ψ` are the bids of earlier requests, capped by their current
//! distance to an open facility:
//! `Φ(e,m) = Σ_{j<r, e∈s_j} (min{a_je, d(F(e),j)} - d(m,j))+` and
//! `Ψ(m) = Σ_{j<r} (min{Σ_{e∈s_j} a_je, d(F̂,j)} - d(m,j))+`.
//!
//! `F(e)` holds every open facility whose configuration contains `e`
//! (large ones included) and `F̂` every open facility offering all of `S`.
//! A large connection or opening discards the temporary small facilities of
//! the current request and replaces its earlier per-commodity connections.
//! The engine only ever opens configurations `{e}` and `S`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{pos, Assignment, Config, Instance, Solution, EPS_TIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    ConnectSmall = 1,
    ConnectLarge = 2,
    OpenSmall = 3,
    OpenLarge = 4,
}

impl EventKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            EventKind::ConnectSmall => "connect_small",
            EventKind::ConnectLarge => "connect_large",
            EventKind::OpenSmall => "open_small",
            EventKind::OpenLarge => "open_large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub commodity: Option<usize>,
    pub point: Option<usize>,
    pub raise_amount: f64,
}

/// One of the four invariant constraints, with its indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    One { e: usize },
    Two,
    Three { e: usize, m: usize },
    Four { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintViolation {
    pub request: usize,
    pub constraint: Constraint,
    pub slack: f64,
}

/// A facility held by the engine. `temporary` facilities were opened by a
/// small event of the request in progress.
#[derive(Debug, Clone, PartialEq)]
pub struct PdFacility {
    pub id: usize,
    pub point: usize,
    pub config: Config,
    pub paid_cost: f64,
    pub temporary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub request: usize,
    pub kind: EventKind,
    pub commodity: Option<usize>,
    pub point: Option<usize>,
    pub raise: f64,
    /// `Σ a_re` over every request after the event.
    pub dual_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    num_commodities: usize,
    /// `a[r][e]`, zero when `e ∉ s_r`.
    a: Vec<Vec<f64>>,
    frozen: Vec<Vec<bool>>,
    facilities: Vec<PdFacility>,
    assignments: Vec<Assignment>,
    /// Connections of the request in progress.
    pending: Assignment,
    trace: Vec<TraceRecord>,
    dual_sum: f64,
}

impl DualState {
    pub fn new(inst: &Instance) -> Self {
        let n = inst.num_requests();
        let s = inst.num_commodities();
        DualState {
            num_commodities: s,
            a: vec![vec![0.0; s]; n],
            frozen: vec![vec![false; s]; n],
            facilities: Vec::new(),
            assignments: Vec::with_capacity(n),
            pending: Assignment::new(0),
            trace: Vec::new(),
            dual_sum: 0.0,
        }
    }

    pub fn dual(&self, r: usize, e: usize) -> f64 {
        self.a[r][e]
    }

    pub fn is_frozen(&self, r: usize, e: usize) -> bool {
        self.frozen[r][e]
    }

    pub fn duals(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// `Σ_r Σ_{e∈s_r} a_re`.
    pub fn dual_sum(&self) -> f64 {
        self.a.iter().flatten().sum()
    }

    pub fn facilities(&self) -> &[PdFacility] {
        &self.facilities
    }

    /// Open facilities offering exactly `{e}`.
    pub fn facilities_small(&self, e: usize) -> impl Iterator<Item = &PdFacility> {
        self.facilities
            .iter()
            .filter(move |f| f.config == Config::singleton(e))
    }

    /// Open facilities offering all commodities.
    pub fn facilities_large(&self) -> impl Iterator<Item = &PdFacility> {
        let full = Config::full(self.num_commodities);
        self.facilities.iter().filter(move |f| f.config == full)
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    fn full(&self) -> Config {
        Config::full(self.num_commodities)
    }

    /// Nearest facility offering `e` to `point` (lowest id on ties).
    fn nearest_offering(&self, inst: &Instance, point: usize, e: usize) -> Option<(f64, usize)> {
        nearest(
            inst,
            point,
            self.facilities.iter().filter(|f| f.config.contains(e)),
        )
    }

    fn nearest_large(&self, inst: &Instance, point: usize) -> Option<(f64, usize)> {
        let full = self.full();
        nearest(inst, point, self.facilities.iter().filter(|f| f.config == full))
    }

    /// `d(F(e), point)`, `+∞` when no facility offers `e`.
    pub fn dist_to_commodity(&self, inst: &Instance, point: usize, e: usize) -> f64 {
        self.nearest_offering(inst, point, e)
            .map_or(f64::INFINITY, |(d, _)| d)
    }

    /// `d(F̂, point)`, `+∞` without large facilities.
    pub fn dist_to_large(&self, inst: &Instance, point: usize) -> f64 {
        self.nearest_large(inst, point).map_or(f64::INFINITY, |(d, _)| d)
    }

    fn demand_sum(&self, inst: &Instance, j: usize) -> f64 {
        inst.requests()[j]
            .commodities
            .iter()
            .map(|e| self.a[j][e])
            .sum()
    }

    /// Capped bids `min{a_je, d(F(e),j)}` of requests `j < r` for `e`.
    fn small_caps(&self, inst: &Instance, r: usize, e: usize) -> Vec<(usize, f64)> {
        inst.requests()[..r.min(inst.num_requests())]
            .iter()
            .enumerate()
            .filter(|(_, req)| req.commodities.contains(e))
            .map(|(j, req)| {
                let cap = self.a[j][e].min(self.dist_to_commodity(inst, req.point, e));
                (req.point, cap)
            })
            .collect()
    }

    /// Capped bids `min{Σ a_j, d(F̂,j)}` of requests `j < r`.
    fn large_caps(&self, inst: &Instance, r: usize) -> Vec<(usize, f64)> {
        inst.requests()[..r.min(inst.num_requests())]
            .iter()
            .enumerate()
            .map(|(j, req)| {
                let cap = self
                    .demand_sum(inst, j)
                    .min(self.dist_to_large(inst, req.point));
                (req.point, cap)
            })
            .collect()
    }

    fn bid_sum(inst: &Instance, caps: &[(usize, f64)], m: usize) -> f64 {
        caps.iter()
            .map(|&(p, cap)| pos(cap - inst.metric().dist(m, p)))
            .sum()
    }

    /// `Φ(e, m)` for the request with index `r`.
    pub fn small_bids(&self, inst: &Instance, r: usize, e: usize, m: usize) -> f64 {
        Self::bid_sum(inst, &self.small_caps(inst, r, e), m)
    }

    /// `Ψ(m)` for the request with index `r`.
    pub fn large_bids(&self, inst: &Instance, r: usize, m: usize) -> f64 {
        Self::bid_sum(inst, &self.large_caps(inst, r), m)
    }

    fn demanded(inst: &Instance, r: usize) -> Config {
        inst.requests()
            .get(r)
            .map_or(Config::EMPTY, |req| req.commodities)
    }

    fn unserved(&self, inst: &Instance, r: usize) -> Config {
        Self::demanded(inst, r)
            .iter()
            .filter(|&e| !self.frozen[r][e])
            .collect()
    }

    /// RHS minus LHS of a constraint for request `r` against the current
    /// state. Every request before `r` counts as earlier. `r` may equal the
    /// number of requests, meaning a request that has not raised anything
    /// yet. Distances to empty facility sets are `+∞`.
    pub fn constraint_slack(&self, inst: &Instance, r: usize, c: Constraint) -> f64 {
        let s_r = Self::demanded(inst, r);
        let own = |e: usize| if s_r.contains(e) { self.a[r][e] } else { 0.0 };
        let point = inst.requests().get(r).map(|q| q.point);
        match c {
            Constraint::One { e } => match point {
                Some(p) => self.dist_to_commodity(inst, p, e) - own(e),
                None => f64::INFINITY,
            },
            Constraint::Two => match point {
                Some(p) => self.dist_to_large(inst, p) - s_r.iter().map(own).sum::<f64>(),
                None => f64::INFINITY,
            },
            Constraint::Three { e, m } => {
                let f = inst
                    .cost()
                    .facility_cost(m, Config::singleton(e))
                    .expect("validated costs");
                let own_bid = point.map_or(0.0, |p| pos(own(e) - inst.metric().dist(m, p)));
                f - own_bid - self.small_bids(inst, r, e, m)
            }
            Constraint::Four { m } => {
                let f = inst
                    .cost()
                    .facility_cost(m, self.full())
                    .expect("validated costs");
                let sum: f64 = s_r.iter().map(own).sum();
                let own_bid = point.map_or(0.0, |p| pos(sum - inst.metric().dist(m, p)));
                f - own_bid - self.large_bids(inst, r, m)
            }
        }
    }

    /// Every constraint of request `r` with slack below `-EPS_TIGHT`.
    ///
    /// Constraints (1) and (2) only bind while duals are still rising, so
    /// they are checked for unfrozen commodities. Constraints (3) and (4)
    /// are checked at every point, (3) for every commodity of `S`.
    pub fn check_constraints(&self, inst: &Instance, r: usize) -> Vec<ConstraintViolation> {
        let mut out = Vec::new();
        let mut push = |constraint, slack: f64| {
            if slack < -EPS_TIGHT {
                out.push(ConstraintViolation {
                    request: r,
                    constraint,
                    slack,
                });
            }
        };
        let unserved = if r < inst.num_requests() {
            self.unserved(inst, r)
        } else {
            Config::EMPTY
        };
        for e in unserved.iter() {
            let c = Constraint::One { e };
            push(c, self.constraint_slack(inst, r, c));
        }
        if !unserved.is_empty() {
            push(Constraint::Two, self.constraint_slack(inst, r, Constraint::Two));
        }
        for m in 0..inst.num_points() {
            for e in 0..self.num_commodities {
                let c = Constraint::Three { e, m };
                push(c, self.constraint_slack(inst, r, c));
            }
            let c = Constraint::Four { m };
            push(c, self.constraint_slack(inst, r, c));
        }
        out
    }

    /// The next constraint to become tight while raising the duals of the
    /// commodities in `unserved` at unit rate.
    ///
    /// Simultaneous events resolve by kind (1 < 2 < 3 < 4), then commodity,
    /// then point.
    pub fn next_event(&self, inst: &Instance, r: usize, unserved: Config) -> Event {
        assert!(!unserved.is_empty(), "no commodity left to raise");
        let req = &inst.requests()[r];
        let rate = unserved.len() as f64;
        let total: f64 = req.commodities.iter().map(|e| self.a[r][e]).sum();
        let mut best: Option<Event> = None;
        let mut consider = |kind, commodity, point, t: f64| {
            let t = t.max(0.0);
            if !t.is_finite() {
                return;
            }
            if best.is_none_or(|b| t < b.raise_amount - EPS_TIGHT) {
                best = Some(Event {
                    kind,
                    commodity,
                    point,
                    raise_amount: t,
                });
            }
        };

        for e in unserved.iter() {
            let t = self.dist_to_commodity(inst, req.point, e) - self.a[r][e];
            consider(EventKind::ConnectSmall, Some(e), None, t);
        }
        let t = (self.dist_to_large(inst, req.point) - total) / rate;
        consider(EventKind::ConnectLarge, None, None, t);
        for e in unserved.iter() {
            let caps = self.small_caps(inst, r, e);
            for m in 0..inst.num_points() {
                let f = inst
                    .cost()
                    .facility_cost(m, Config::singleton(e))
                    .expect("validated costs");
                let t = inst.dist(m, req) + f - Self::bid_sum(inst, &caps, m) - self.a[r][e];
                consider(EventKind::OpenSmall, Some(e), Some(m), t);
            }
        }
        let caps = self.large_caps(inst, r);
        for m in 0..inst.num_points() {
            let f = inst
                .cost()
                .facility_cost(m, self.full())
                .expect("validated costs");
            let t = (inst.dist(m, req) + f - Self::bid_sum(inst, &caps, m) - total) / rate;
            consider(EventKind::OpenLarge, None, Some(m), t);
        }
        best.expect("constraint (3) is always finite")
    }

    fn open(&mut self, inst: &Instance, point: usize, config: Config, temporary: bool) -> usize {
        let id = self.facilities.iter().map(|f| f.id + 1).max().unwrap_or(0);
        let paid_cost = inst
            .cost()
            .facility_cost(point, config)
            .expect("validated costs");
        self.facilities.push(PdFacility {
            id,
            point,
            config,
            paid_cost,
            temporary,
        });
        id
    }

    fn freeze(&mut self, r: usize, e: usize) {
        debug_assert!(!self.frozen[r][e], "a_re frozen twice");
        self.frozen[r][e] = true;
    }

    /// Raises the unfrozen duals of `r` by `ev.raise_amount` and performs the
    /// event's action.
    pub fn apply_event(&mut self, inst: &Instance, r: usize, ev: &Event) {
        let req = &inst.requests()[r];
        let unserved = self.unserved(inst, r);
        for e in unserved.iter() {
            self.a[r][e] += ev.raise_amount;
        }
        self.dual_sum += ev.raise_amount * unserved.len() as f64;
        if self.pending.request_index != r {
            self.pending = Assignment::new(r);
        }
        match ev.kind {
            EventKind::ConnectSmall => {
                let e = ev.commodity.expect("commodity event");
                let (_, fid) = self
                    .nearest_offering(inst, req.point, e)
                    .expect("tight constraint (1) needs a facility");
                self.freeze(r, e);
                self.pending.connect(fid, Config::singleton(e));
            }
            EventKind::OpenSmall => {
                let e = ev.commodity.expect("commodity event");
                let m = ev.point.expect("point event");
                let fid = self.open(inst, m, Config::singleton(e), true);
                self.freeze(r, e);
                self.pending.connect(fid, Config::singleton(e));
            }
            EventKind::ConnectLarge | EventKind::OpenLarge => {
                for e in unserved.iter() {
                    self.freeze(r, e);
                }
                self.facilities.retain(|f| !f.temporary);
                let fid = if ev.kind == EventKind::OpenLarge {
                    let m = ev.point.expect("point event");
                    let full = self.full();
                    self.open(inst, m, full, false)
                } else {
                    self.nearest_large(inst, req.point)
                        .expect("tight constraint (2) needs a large facility")
                        .1
                };
                self.pending = Assignment::new(r);
                self.pending.connect(fid, req.commodities);
            }
        }
        self.trace.push(TraceRecord {
            request: r,
            kind: ev.kind,
            commodity: ev.commodity,
            point: ev.point,
            raise: ev.raise_amount,
            dual_sum: self.dual_sum,
        });
    }

    /// Makes the remaining temporary facilities permanent and records the
    /// request's assignment.
    fn finish_request(&mut self, r: usize) {
        for f in &mut self.facilities {
            f.temporary = false;
        }
        let mut asg = core::mem::replace(&mut self.pending, Assignment::new(r + 1));
        asg.request_index = r;
        self.assignments.push(asg);
    }

    /// Processes request `r`, calling `observe` after every event.
    pub fn process_request<F>(&mut self, inst: &Instance, r: usize, mut observe: F)
    where
        F: FnMut(&DualState, &Event),
    {
        self.pending = Assignment::new(r);
        loop {
            let unserved = self.unserved(inst, r);
            if unserved.is_empty() {
                break;
            }
            let ev = self.next_event(inst, r, unserved);
            self.apply_event(inst, r, &ev);
            observe(self, &ev);
        }
        self.finish_request(r);
    }

    pub fn solution(&self) -> Solution {
        Solution {
            facilities: self
                .facilities
                .iter()
                .map(|f| crate::Facility {
                    id: f.id,
                    point: f.point,
                    config: f.config,
                    paid_cost: f.paid_cost,
                })
                .collect(),
            assignments: self.assignments.clone(),
        }
    }
}

fn nearest<'a>(
    inst: &Instance,
    point: usize,
    facilities: impl Iterator<Item = &'a PdFacility>,
) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for f in facilities {
        let d = inst.metric().dist(f.point, point);
        if best.is_none_or(|(bd, bid)| d < bd || (d == bd && f.id < bid)) {
            best = Some((d, f.id));
        }
    }
    best
}

/// Runs the algorithm over the whole sequence.
///
/// Costs for every singleton and for the full configuration must be
/// available at every point (see
/// [`CostModel::check_algorithm_costs`](crate::CostModel::check_algorithm_costs)).
pub fn run_pd(inst: &Instance) -> (Solution, DualState) {
    run_pd_observed(inst, |_, _, _| {})
}

/// [`run_pd`] with a callback after every event: `(state, request, event)`.
pub fn run_pd_observed<F>(inst: &Instance, mut observe: F) -> (Solution, DualState)
where
    F: FnMut(&DualState, usize, &Event),
{
    let mut state = DualState::new(inst);
    for r in 0..inst.num_requests() {
        state.process_request(inst, r, |s, ev| observe(s, r, ev));
    }
    (state.solution(), state)
}

/// Outcome of a run with constraint checks after every event.
#[derive(Debug, Clone)]
pub struct CheckedRun {
    pub solution: Solution,
    pub state: DualState,
    /// `(event index, violation)`.
    pub violations: Vec<(usize, ConstraintViolation)>,
    pub events: usize,
}

/// Runs the algorithm and checks all four constraint families after every
/// event, plus the bids of a fresh request after the last one.
pub fn run_pd_checked(inst: &Instance) -> CheckedRun {
    let mut violations = Vec::new();
    let mut events = 0;
    let (solution, state) = run_pd_observed(inst, |s, r, _| {
        for v in s.check_constraints(inst, r) {
            violations.push((events, v));
        }
        events += 1;
    });
    for v in state.check_constraints(inst, inst.num_requests()) {
        violations.push((events, v));
    }
    CheckedRun {
        solution,
        state,
        violations,
        events,
    }
}
