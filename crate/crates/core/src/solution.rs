//! Facilities, assignments and the cost of a solution.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::{Config, Error, Instance, Request, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Facility {
    pub id: usize,
    pub point: usize,
    pub config: Config,
    /// Actual `f_m^σ`, never a rounded class value.
    pub paid_cost: f64,
}

/// The facilities one request is connected to, each with the commodities it
/// covers for that request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    pub request_index: usize,
    pub connections: Vec<(usize, Config)>,
}

impl Assignment {
    pub fn new(request_index: usize) -> Self {
        Assignment {
            request_index,
            connections: Vec::new(),
        }
    }

    /// Adds `covered` to the connection with `facility`, creating it if
    /// needed. Keeps facility ids distinct.
    pub fn connect(&mut self, facility: usize, covered: Config) {
        match self.connections.iter_mut().find(|(f, _)| *f == facility) {
            Some((_, c)) => *c = c.union(covered),
            None => self.connections.push((facility, covered)),
        }
    }

    pub fn covered(&self) -> Config {
        self.connections
            .iter()
            .fold(Config::EMPTY, |acc, &(_, c)| acc.union(c))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub facilities: Vec<Facility>,
    pub assignments: Vec<Assignment>,
}

impl Solution {
    /// Opens a facility with the next free id.
    pub fn open(&mut self, point: usize, config: Config, paid_cost: f64) -> usize {
        let id = self.facilities.iter().map(|f| f.id + 1).max().unwrap_or(0);
        self.facilities.push(Facility {
            id,
            point,
            config,
            paid_cost,
        });
        id
    }

    pub fn facility(&self, id: usize) -> Option<&Facility> {
        self.facilities.iter().find(|f| f.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub construction: f64,
    pub connection: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityViolation {
    MissingAssignment { request: usize },
    UnknownFacility { request: usize, facility: usize },
    /// The covered subset is not offered by the facility or not demanded.
    CoverNotOffered {
        request: usize,
        facility: usize,
        covered: Config,
    },
    DuplicateFacility { request: usize, facility: usize },
    Uncovered { request: usize, commodity: usize },
}

pub type FeasibilityReport = Vec<FeasibilityViolation>;

pub fn check_feasible(inst: &Instance, sol: &Solution) -> FeasibilityReport {
    let by_id: BTreeMap<usize, &Facility> = sol.facilities.iter().map(|f| (f.id, f)).collect();
    let mut report = Vec::new();
    for (ri, r) in inst.requests().iter().enumerate() {
        let Some(asg) = sol.assignments.iter().find(|a| a.request_index == ri) else {
            report.push(FeasibilityViolation::MissingAssignment { request: ri });
            continue;
        };
        let mut covered = Config::EMPTY;
        for (k, &(fid, cov)) in asg.connections.iter().enumerate() {
            if asg.connections[..k].iter().any(|&(g, _)| g == fid) {
                report.push(FeasibilityViolation::DuplicateFacility {
                    request: ri,
                    facility: fid,
                });
            }
            let Some(f) = by_id.get(&fid) else {
                report.push(FeasibilityViolation::UnknownFacility {
                    request: ri,
                    facility: fid,
                });
                continue;
            };
            if !cov.is_subset(f.config.intersection(r.commodities)) {
                report.push(FeasibilityViolation::CoverNotOffered {
                    request: ri,
                    facility: fid,
                    covered: cov,
                });
            }
            covered = covered.union(cov.intersection(f.config));
        }
        for e in r.commodities.difference(covered).iter() {
            report.push(FeasibilityViolation::Uncovered {
                request: ri,
                commodity: e,
            });
        }
    }
    report
}

/// Construction cost plus, per request, the distance to each distinct
/// connected facility (counted once however many commodities it covers).
pub fn evaluate_cost(inst: &Instance, sol: &Solution) -> Result<CostBreakdown> {
    let report = check_feasible(inst, sol);
    if let Some(v) = report.first() {
        let first_uncovered = report.iter().find_map(|v| match v {
            FeasibilityViolation::Uncovered { request, commodity } => Some((*request, *commodity)),
            _ => None,
        });
        return Err(match first_uncovered {
            Some((request, commodity)) => Error::Infeasible { request, commodity },
            None => Error::InvalidParams(format!("malformed solution: {v:?}")),
        });
    }
    let by_id: BTreeMap<usize, &Facility> = sol.facilities.iter().map(|f| (f.id, f)).collect();
    let construction: f64 = sol.facilities.iter().map(|f| f.paid_cost).sum();
    let mut connection = 0.0;
    for asg in &sol.assignments {
        let r = &inst.requests()[asg.request_index];
        connection += connection_cost(inst, r, asg.connections.iter().map(|&(f, _)| by_id[&f].point));
    }
    Ok(CostBreakdown {
        construction,
        connection,
        total: construction + connection,
    })
}

fn connection_cost(inst: &Instance, r: &Request, points: impl Iterator<Item = usize>) -> f64 {
    points.map(|m| inst.dist(m, r)).sum()
}

/// Replaces every request demanding `k` commodities with `k` consecutive
/// single-commodity requests at the same point.
pub fn split_requests(inst: &Instance) -> Instance {
    let demands = inst
        .requests()
        .iter()
        .flat_map(|r| r.commodities.iter().map(move |e| (r.point, Config::singleton(e))));
    Instance::from_demands(inst.metric().clone(), inst.cost().clone(), demands)
        .expect("split of a valid instance is valid")
        .with_opt_upper_bound(inst.known_opt_upper_bound())
}

/// Maps a solution of `inst` onto `split_requests(inst)`: every split
/// request connects to the facility that covered its commodity.
pub fn lift_solution(inst: &Instance, sol: &Solution) -> Solution {
    let mut assignments = Vec::new();
    let mut next = 0;
    for (ri, r) in inst.requests().iter().enumerate() {
        let asg = sol.assignments.iter().find(|a| a.request_index == ri);
        for e in r.commodities.iter() {
            let mut a = Assignment::new(next);
            if let Some(&(fid, _)) = asg.and_then(|a| a.connections.iter().find(|(_, c)| c.contains(e))) {
                a.connect(fid, Config::singleton(e));
            }
            assignments.push(a);
            next += 1;
        }
    }
    Solution {
        facilities: sol.facilities.clone(),
        assignments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::build_line_metric;
    use crate::{CostModel, MetricSpace};
    use alloc::vec;

    fn unit_line(coords: &[f64], s: usize) -> (MetricSpace, CostModel) {
        (build_line_metric(coords).unwrap(), CostModel::poly(s, 0.0).unwrap())
    }

    #[test]
    fn empty_instance_costs_nothing() {
        let (m, c) = unit_line(&[0.0], 1);
        let inst = Instance::new(m, c, vec![]).unwrap();
        let cb = evaluate_cost(&inst, &Solution::default()).unwrap();
        assert_eq!(cb, CostBreakdown::default());
    }

    #[test]
    fn single_facility_single_request() {
        let m = MetricSpace::single_point();
        let c = CostModel::size_based(vec![5.0]).unwrap();
        let inst = Instance::from_demands(m, c, [(0, Config::singleton(0))]).unwrap();
        let mut sol = Solution::default();
        let f = sol.open(0, Config::singleton(0), 5.0);
        let mut a = Assignment::new(0);
        a.connect(f, Config::singleton(0));
        sol.assignments.push(a);
        let cb = evaluate_cost(&inst, &sol).unwrap();
        assert_eq!((cb.construction, cb.connection, cb.total), (5.0, 0.0, 5.0));
    }

    #[test]
    fn two_point_line() {
        let (m, c) = unit_line(&[0.0, 0.3], 1);
        let e = Config::singleton(0);
        let inst = Instance::from_demands(m, c, [(0, e), (1, e)]).unwrap();
        let mut sol = Solution::default();
        let f = sol.open(0, e, 1.0);
        for r in 0..2 {
            let mut a = Assignment::new(r);
            a.connect(f, e);
            sol.assignments.push(a);
        }
        let cb = evaluate_cost(&inst, &sol).unwrap();
        assert_eq!(cb.construction, 1.0);
        assert!((cb.connection - 0.3).abs() < 1e-15);
        assert!((cb.total - 1.3).abs() < 1e-15);
    }

    fn ab_instance() -> Instance {
        let (m, c) = unit_line(&[0.0], 2);
        Instance::from_demands(m, c, [(0, Config::full(2))]).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let inst = ab_instance();
        let (a, b) = (Config::singleton(0), Config::singleton(1));

        let mut sol = Solution::default();
        let f = sol.open(0, a, 1.0);
        let mut asg = Assignment::new(0);
        asg.connect(f, a);
        sol.assignments.push(asg);
        assert_eq!(
            check_feasible(&inst, &sol),
            vec![FeasibilityViolation::Uncovered {
                request: 0,
                commodity: 1
            }]
        );
        assert_eq!(
            evaluate_cost(&inst, &sol),
            Err(Error::Infeasible {
                request: 0,
                commodity: 1
            })
        );

        let g = sol.open(0, b, 1.0);
        sol.assignments[0].connect(g, b);
        assert!(check_feasible(&inst, &sol).is_empty());

        let mut sol = Solution::default();
        let f = sol.open(0, Config::full(2), 1.0);
        let mut asg = Assignment::new(0);
        asg.connect(f, Config::full(2));
        sol.assignments.push(asg);
        assert!(check_feasible(&inst, &sol).is_empty());
    }

    #[test]
    fn connection_counted_once_per_facility() {
        let (m, c) = unit_line(&[0.0, 2.0], 2);
        let inst = Instance::from_demands(m, c, [(1, Config::full(2))]).unwrap();
        let mut sol = Solution::default();
        let f = sol.open(0, Config::full(2), 1.0);
        let mut asg = Assignment::new(0);
        asg.connect(f, Config::singleton(0));
        asg.connect(f, Config::singleton(1));
        assert_eq!(asg.connections.len(), 1);
        sol.assignments.push(asg);
        assert_eq!(evaluate_cost(&inst, &sol).unwrap().connection, 2.0);
    }

    #[test]
    fn split_examples() {
        let inst = ab_instance();
        let split = split_requests(&inst);
        assert_eq!(split.num_requests(), 2);
        assert_eq!(split.requests()[0].commodities, Config::singleton(0));
        assert_eq!(split.requests()[1].commodities, Config::singleton(1));
        assert_eq!(split.requests()[1].arrival_index, 1);

        let (m, c) = unit_line(&[0.0, 1.0], 3);
        let inst = Instance::from_demands(
            m,
            c,
            [(0, Config::singleton(2)), (1, Config::full(3)), (0, Config::singleton(1))],
        )
        .unwrap();
        let split = split_requests(&inst);
        assert_eq!(split.num_requests(), 5);
        assert!(split.num_requests() <= inst.num_requests() * 3);
        assert_eq!(split.requests()[2].point, 1);
    }
}
