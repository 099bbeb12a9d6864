//! Reference strategies.

use alloc::vec::Vec;

use crate::randomized::run_rand;
use crate::{Assignment, Config, Facility, Instance, Result, Solution};

/// Solves each commodity as its own single-commodity instance with the
/// randomized algorithm and merges the results.
///
/// Commodity `e` uses seed `seed ^ (e · 0x9E3779B97F4A7C15)`, so commodity 0
/// runs with `seed` itself.
pub fn run_per_commodity(inst: &Instance, seed: u64) -> Result<Solution> {
    let mut merged = Solution {
        facilities: Vec::new(),
        assignments: (0..inst.num_requests()).map(Assignment::new).collect(),
    };
    for e in 0..inst.num_commodities() {
        let cost = inst.cost().restrict_to_commodity(inst.num_points(), e)?;
        let members: Vec<usize> = inst
            .requests()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.commodities.contains(e))
            .map(|(i, _)| i)
            .collect();
        let sub = Instance::from_demands(
            inst.metric().clone(),
            cost,
            members
                .iter()
                .map(|&i| (inst.requests()[i].point, Config::singleton(0))),
        )?;
        let sub_seed = seed ^ (e as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let run = run_rand(&sub, sub_seed)?;
        let offset = merged.facilities.len();
        for f in &run.solution.facilities {
            merged.facilities.push(Facility {
                id: offset + f.id,
                point: f.point,
                config: Config::singleton(e),
                paid_cost: f.paid_cost,
            });
        }
        for asg in &run.solution.assignments {
            let original = members[asg.request_index];
            for &(fid, _) in &asg.connections {
                merged.assignments[original].connect(offset + fid, Config::singleton(e));
            }
        }
    }
    Ok(merged)
}

/// Never offers an undemanded commodity: each commodity of an arriving
/// request connects to the nearest facility offering it, or opens the
/// cheapest singleton facility `argmin_m f_m^{e} + d(m, r)` when that is
/// strictly cheaper.
pub fn run_no_prediction(inst: &Instance) -> Result<Solution> {
    let mut sol = Solution::default();
    for (ri, r) in inst.requests().iter().enumerate() {
        let mut asg = Assignment::new(ri);
        for e in r.commodities.iter() {
            let existing = sol
                .facilities
                .iter()
                .filter(|f| f.config.contains(e))
                .map(|f| (inst.dist(f.point, r), f.id))
                .fold(None, |best: Option<(f64, usize)>, c| match best {
                    Some(b) if b.0 <= c.0 => Some(b),
                    _ => Some(c),
                });
            let mut open: Option<(f64, usize, f64)> = None;
            for m in 0..inst.num_points() {
                let f = inst.cost().facility_cost(m, Config::singleton(e))?;
                let total = f + inst.dist(m, r);
                if open.is_none_or(|(t, _, _)| total < t) {
                    open = Some((total, m, f));
                }
            }
            let (total, m, f) = open.expect("nonempty metric");
            let fid = match existing {
                Some((d, fid)) if d <= total => fid,
                _ => sol.open(m, Config::singleton(e), f),
            };
            asg.connect(fid, Config::singleton(e));
        }
        sol.assignments.push(asg);
    }
    Ok(sol)
}
