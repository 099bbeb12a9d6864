//! Exact offline optimum by enumeration, the scaled dual-feasibility
//! checker, and the analysis constants `H_n` and `γ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::check_subadditivity;
use crate::{pos, Assignment, Config, Error, Instance, Result, Solution, EPS_TIGHT};

/// `H_n = Σ_{k=1}^n 1/k`, summed smallest term first.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Dual scaling factor `1 / (5 √|S| H_n)`.
pub fn gamma(num_commodities: usize, n: usize) -> f64 {
    1.0 / (5.0 * libm::sqrt(num_commodities as f64) * harmonic(n))
}

/// Upper limits on the enumeration. Instances beyond them are refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_points: usize,
    pub max_commodities: usize,
    pub max_requests: usize,
    /// Bound on `(2^|S|)^|M|`, the number of configuration vectors.
    pub max_config_vectors: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_points: 4,
            max_commodities: 4,
            max_requests: 10,
            max_config_vectors: 1 << 16,
        }
    }
}

impl OracleLimits {
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let (m, s, n) = (inst.num_points(), inst.num_commodities(), inst.num_requests());
        if m > self.max_points {
            return Err(Error::OracleLimit(format!(
                "{m} points > limit {}",
                self.max_points
            )));
        }
        if s > self.max_commodities {
            return Err(Error::OracleLimit(format!(
                "{s} commodities > limit {}",
                self.max_commodities
            )));
        }
        if n > self.max_requests {
            return Err(Error::OracleLimit(format!(
                "{n} requests > limit {}",
                self.max_requests
            )));
        }
        let vectors = (s as u32)
            .checked_mul(m as u32)
            .filter(|&bits| bits < 64)
            .map(|bits| 1u64 << bits);
        match vectors {
            Some(v) if v <= self.max_config_vectors => Ok(()),
            _ => Err(Error::OracleLimit(format!(
                "2^({s}*{m}) configuration vectors > limit {}",
                self.max_config_vectors
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub solution: Solution,
    pub cost: f64,
    pub nodes_explored: u64,
}

/// Facility costs `cost[m][σ]` for every `σ ⊆ S` (`σ = ∅` costs 0).
fn cost_table(inst: &Instance) -> Result<Vec<Vec<f64>>> {
    let s = inst.num_commodities();
    (0..inst.num_points())
        .map(|m| {
            (0..1u64 << s)
                .map(|sigma| {
                    if sigma == 0 {
                        Ok(0.0)
                    } else {
                        inst.cost().facility_cost(m, Config(sigma))
                    }
                })
                .collect()
        })
        .collect()
}

fn precheck(inst: &Instance, limits: &OracleLimits) -> Result<Vec<Vec<f64>>> {
    limits.check(inst)?;
    if !check_subadditivity(inst.cost(), inst.metric())?.is_empty() {
        return Err(Error::NotSubadditive);
    }
    cost_table(inst)
}

/// Exact optimum by enumerating one configuration `σ_m ⊆ S` per point.
///
/// One facility per point loses nothing under a subadditive cost model. For
/// each configuration vector every request picks a minimum-distance set of
/// points whose configurations cover its demand. Vectors whose
/// construction cost alone reaches the incumbent are skipped; ties keep the
/// lexicographically first vector.
pub fn solve_opt_bruteforce(inst: &Instance, limits: &OracleLimits) -> Result<OptResult> {
    let fcost = precheck(inst, limits)?;
    let m_count = inst.num_points();
    let radix = 1u64 << inst.num_commodities();
    let subsets = 1usize << m_count;
    let requests = inst.requests();

    // dsum[r][T] = Σ_{m∈T} d(m, r)
    let dsum: Vec<Vec<f64>> = requests
        .iter()
        .map(|r| {
            (0..subsets)
                .map(|t| (0..m_count).filter(|m| t >> m & 1 == 1).map(|m| inst.dist(m, r)).sum())
                .collect()
        })
        .collect();

    let mut sigma = vec![0u64; m_count];
    let mut union = vec![0u64; subsets];
    let mut best_cost = f64::INFINITY;
    let mut best_sigma = sigma.clone();
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        let construction: f64 = (0..m_count).map(|m| fcost[m][sigma[m] as usize]).sum();
        if construction < best_cost {
            for t in 1..subsets {
                let low = t.trailing_zeros() as usize;
                union[t] = union[t & (t - 1)] | sigma[low];
            }
            let mut total = construction;
            for (ri, r) in requests.iter().enumerate() {
                let need = r.commodities.0;
                let mut cheapest = f64::INFINITY;
                for t in 1..subsets {
                    if need & !union[t] == 0 && dsum[ri][t] < cheapest {
                        cheapest = dsum[ri][t];
                    }
                }
                total += cheapest;
                if total >= best_cost {
                    break;
                }
            }
            if total < best_cost {
                best_cost = total;
                best_sigma.copy_from_slice(&sigma);
            }
        }
        // mixed-radix increment, point 0 least significant
        let mut k = 0;
        while k < m_count {
            sigma[k] += 1;
            if sigma[k] < radix {
                break;
            }
            sigma[k] = 0;
            k += 1;
        }
        if k == m_count {
            break;
        }
    }
    if requests.is_empty() {
        best_cost = 0.0;
        best_sigma.iter_mut().for_each(|s| *s = 0);
    }
    let solution = materialize(inst, &fcost, &best_sigma);
    Ok(OptResult {
        solution,
        cost: best_cost,
        nodes_explored: nodes,
    })
}

/// Builds the solution for a configuration vector: one facility per point
/// with a nonempty configuration, each request on its cheapest cover.
fn materialize(inst: &Instance, fcost: &[Vec<f64>], sigma: &[u64]) -> Solution {
    let mut sol = Solution::default();
    let mut ids = vec![None; sigma.len()];
    for (m, &s) in sigma.iter().enumerate() {
        if s != 0 {
            ids[m] = Some(sol.open(m, Config(s), fcost[m][s as usize]));
        }
    }
    let m_count = sigma.len();
    for (ri, r) in inst.requests().iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for t in 1usize..1 << m_count {
            let pts = (0..m_count).filter(|m| t >> m & 1 == 1);
            let cover = pts.clone().fold(0u64, |acc, m| acc | sigma[m]);
            if r.commodities.0 & !cover != 0 {
                continue;
            }
            let d: f64 = pts.map(|m| inst.dist(m, r)).sum();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, t));
            }
        }
        let mut asg = Assignment::new(ri);
        if let Some((_, t)) = best {
            for m in (0..m_count).filter(|m| t >> m & 1 == 1) {
                let covered = Config(sigma[m]).intersection(r.commodities);
                if let (Some(id), false) = (ids[m], covered.is_empty()) {
                    asg.connect(id, covered);
                }
            }
        }
        sol.assignments.push(asg);
    }
    sol
}

/// Second, independent exact route used to cross-check
/// [`solve_opt_bruteforce`].
///
/// Enumerates, commodity by commodity, the set of points offering it, and
/// solves each request's cover by a dynamic program over points and covered
/// commodity masks. No pruning.
pub fn solve_opt_by_commodity_sites(inst: &Instance, limits: &OracleLimits) -> Result<f64> {
    let fcost = precheck(inst, limits)?;
    if inst.num_requests() == 0 {
        return Ok(0.0);
    }
    let s = inst.num_commodities();
    let m_count = inst.num_points();
    let radix = 1u64 << m_count;
    let mut sites = vec![0u64; s];
    let mut best = f64::INFINITY;
    let mut dp = Vec::new();
    loop {
        let configs: Vec<u64> = (0..m_count)
            .map(|m| {
                (0..s)
                    .filter(|&e| sites[e] >> m & 1 == 1)
                    .fold(0u64, |acc, e| acc | 1 << e)
            })
            .collect();
        let mut total: f64 = configs
            .iter()
            .enumerate()
            .map(|(m, &c)| fcost[m][c as usize])
            .sum();
        for r in inst.requests() {
            // dp over subsets of the request's own demand
            let need = r.commodities.0;
            let k = need.count_ones();
            dp.clear();
            dp.resize(1 << k, f64::INFINITY);
            dp[0] = 0.0;
            for (m, &c) in configs.iter().enumerate() {
                let local = compress(c & need, need);
                if local == 0 {
                    continue;
                }
                let d = inst.dist(m, r);
                for mask in (0..dp.len()).rev() {
                    let next = mask | local as usize;
                    if dp[mask] + d < dp[next] {
                        dp[next] = dp[mask] + d;
                    }
                }
            }
            total += dp[(1 << k) - 1];
        }
        if total < best {
            best = total;
        }
        let mut e = 0;
        while e < s {
            sites[e] += 1;
            if sites[e] < radix {
                break;
            }
            sites[e] = 0;
            e += 1;
        }
        if e == s {
            break;
        }
    }
    Ok(best)
}

/// Packs the bits of `x` selected by `mask` into the low bits.
fn compress(x: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        let low = m.trailing_zeros();
        if x >> low & 1 == 1 {
            out |= 1 << bit;
        }
        bit += 1;
        m &= m - 1;
    }
    out
}

/// Duals `a[r][e]` together with the factor they are scaled by.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub a: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl DualCertificate {
    /// `γ Σ a_re` over demanded pairs.
    pub fn objective(&self, inst: &Instance) -> f64 {
        inst.requests()
            .iter()
            .enumerate()
            .map(|(r, req)| req.commodities.iter().map(|e| self.a[r][e]).sum::<f64>())
            .sum::<f64>()
            * self.gamma
    }
}

/// A point and configuration where the scaled duals overpay.
#[derive(Debug, Clone, PartialEq)]
pub struct DualViolation {
    pub point: usize,
    pub config: Config,
    pub lhs: f64,
    pub cost: f64,
}

/// Checks `Σ_r (Σ_{e∈s_r∩σ} γ a_re - d(m,r))+ <= f_m^σ` for every point and
/// every nonempty `σ ⊆ S`. Summing over all requests is the worst case over
/// request subsets since every summand is clipped at zero.
pub fn check_dual_feasibility(inst: &Instance, cert: &DualCertificate) -> Result<Vec<DualViolation>> {
    let s = inst.num_commodities();
    if s > 12 {
        return Err(Error::OracleLimit(format!(
            "{s} commodities > 12 for dual enumeration"
        )));
    }
    let mut out = Vec::new();
    for m in 0..inst.num_points() {
        for sigma in inst.full_config().nonempty_subsets() {
            let lhs: f64 = inst
                .requests()
                .iter()
                .enumerate()
                .map(|(r, req)| {
                    let bid: f64 = req
                        .commodities
                        .intersection(sigma)
                        .iter()
                        .map(|e| cert.gamma * cert.a[r][e])
                        .sum();
                    pos(bid - inst.dist(m, req))
                })
                .sum();
            let cost = inst.cost().facility_cost(m, sigma)?;
            if lhs > cost + EPS_TIGHT {
                out.push(DualViolation {
                    point: m,
                    config: sigma,
                    lhs,
                    cost,
                });
            }
        }
    }
    Ok(out)
}
