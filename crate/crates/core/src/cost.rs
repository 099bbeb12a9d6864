//! Facility construction costs `f_m^σ`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::MAX_COMMODITIES;
use crate::{Config, Error, MetricSpace, Result, EPS_TIGHT};

#[derive(Debug, Clone, PartialEq)]
pub enum CostKind {
    /// Explicit `(point, configuration) -> cost` entries. Missing entries
    /// are an error on lookup.
    Table(BTreeMap<(usize, Config), f64>),
    /// `g[k-1]` is the cost of any configuration of size `k`, at any point.
    SizeBased(Vec<f64>),
    /// `|σ|^{x/2}` at every point.
    Poly(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    kind: CostKind,
    num_commodities: usize,
}

fn check_commodity_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_COMMODITIES {
        return Err(Error::CommodityCount(n));
    }
    Ok(())
}

impl CostModel {
    pub fn table(num_commodities: usize, entries: BTreeMap<(usize, Config), f64>) -> Result<Self> {
        check_commodity_count(num_commodities)?;
        let full = Config::full(num_commodities);
        for (&(point, config), &cost) in &entries {
            if config.is_empty() {
                return Err(Error::EmptyConfig);
            }
            if !config.is_subset(full) {
                return Err(Error::ConfigOutOfRange {
                    config,
                    num_commodities,
                });
            }
            if !(cost > 0.0 && cost.is_finite()) {
                return Err(Error::NonPositiveCost {
                    point,
                    config,
                    cost,
                });
            }
        }
        Ok(CostModel {
            kind: CostKind::Table(entries),
            num_commodities,
        })
    }

    pub fn size_based(g: Vec<f64>) -> Result<Self> {
        let n = g.len();
        check_commodity_count(n)?;
        for (k, &c) in g.iter().enumerate() {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::NonPositiveCost {
                    point: 0,
                    config: Config::full(k + 1),
                    cost: c,
                });
            }
        }
        Ok(CostModel {
            kind: CostKind::SizeBased(g),
            num_commodities: n,
        })
    }

    /// `g_x(k) = k^{x/2}`.
    pub fn poly(num_commodities: usize, x: f64) -> Result<Self> {
        check_commodity_count(num_commodities)?;
        if !(0.0..=2.0).contains(&x) {
            return Err(Error::ExponentOutOfRange(x));
        }
        Ok(CostModel {
            kind: CostKind::Poly(x),
            num_commodities,
        })
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    pub fn num_commodities(&self) -> usize {
        self.num_commodities
    }

    pub fn full_config(&self) -> Config {
        Config::full(self.num_commodities)
    }

    /// `f_m^σ`.
    pub fn facility_cost(&self, m: usize, sigma: Config) -> Result<f64> {
        if sigma.is_empty() {
            return Err(Error::EmptyConfig);
        }
        if !sigma.is_subset(self.full_config()) {
            return Err(Error::ConfigOutOfRange {
                config: sigma,
                num_commodities: self.num_commodities,
            });
        }
        match &self.kind {
            CostKind::Table(t) => t
                .get(&(m, sigma))
                .copied()
                .ok_or(Error::MissingCost {
                    point: m,
                    config: sigma,
                }),
            CostKind::SizeBased(g) => Ok(g[sigma.len() - 1]),
            CostKind::Poly(x) => Ok(libm::pow(sigma.len() as f64, x / 2.0)),
        }
    }

    /// Cost by configuration size, for kinds that depend on size only.
    pub fn size_cost(&self, k: usize) -> Option<f64> {
        match &self.kind {
            CostKind::Table(_) => None,
            CostKind::SizeBased(g) => Some(g[k - 1]),
            CostKind::Poly(x) => Some(libm::pow(k as f64, x / 2.0)),
        }
    }

    /// Checks that the singleton and full configurations the online
    /// algorithms use are priced at every point.
    pub fn check_algorithm_costs(&self, num_points: usize) -> Result<()> {
        let full = self.full_config();
        for m in 0..num_points {
            self.facility_cost(m, full)?;
            for e in 0..self.num_commodities {
                self.facility_cost(m, Config::singleton(e))?;
            }
        }
        Ok(())
    }

    /// Restricts a table to one point, as costs for a one-commodity universe
    /// consisting of `commodity`.
    pub fn restrict_to_commodity(&self, num_points: usize, commodity: usize) -> Result<CostModel> {
        let mut entries = BTreeMap::new();
        for m in 0..num_points {
            entries.insert(
                (m, Config::singleton(0)),
                self.facility_cost(m, Config::singleton(commodity))?,
            );
        }
        CostModel::table(1, entries)
    }
}

/// Where a cost property fails: a concrete table entry, or a size for
/// size-only kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostSite {
    Entry { point: usize, config: Config },
    Size(usize),
}

/// `f_m^σ / |σ| < f_m^S / |S|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition1Violation {
    pub site: CostSite,
    pub per_commodity: f64,
    pub full_per_commodity: f64,
}

/// Per-commodity cost is minimized by the full configuration.
pub fn check_condition1(cost: &CostModel, metric: &MetricSpace) -> Result<Vec<Condition1Violation>> {
    let s = cost.num_commodities();
    let full = cost.full_config();
    let mut out = Vec::new();
    match cost.kind() {
        CostKind::Table(_) => {
            for m in 0..metric.len() {
                let full_ratio = cost.facility_cost(m, full)? / s as f64;
                for sigma in full.nonempty_subsets() {
                    let ratio = cost.facility_cost(m, sigma)? / sigma.len() as f64;
                    if ratio < full_ratio - EPS_TIGHT {
                        out.push(Condition1Violation {
                            site: CostSite::Entry {
                                point: m,
                                config: sigma,
                            },
                            per_commodity: ratio,
                            full_per_commodity: full_ratio,
                        });
                    }
                }
            }
        }
        _ => {
            let full_ratio = cost.size_cost(s).unwrap() / s as f64;
            for k in 1..=s {
                let ratio = cost.size_cost(k).unwrap() / k as f64;
                if ratio < full_ratio - EPS_TIGHT {
                    out.push(Condition1Violation {
                        site: CostSite::Size(k),
                        per_commodity: ratio,
                        full_per_commodity: full_ratio,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `f_m^{a ∪ b} > f_m^a + f_m^b`. For size-only kinds the sites carry
/// sizes with `|a| + |b| >= |a ∪ b|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubadditivityViolation {
    pub whole: CostSite,
    pub a: CostSite,
    pub b: CostSite,
    pub whole_cost: f64,
    pub parts_cost: f64,
}

pub fn check_subadditivity(
    cost: &CostModel,
    metric: &MetricSpace,
) -> Result<Vec<SubadditivityViolation>> {
    let s = cost.num_commodities();
    let full = cost.full_config();
    let mut out = Vec::new();
    match cost.kind() {
        CostKind::Table(_) => {
            for m in 0..metric.len() {
                let site = |config| CostSite::Entry { point: m, config };
                for sigma in full.nonempty_subsets() {
                    let whole_cost = cost.facility_cost(m, sigma)?;
                    for a in sigma.nonempty_subsets() {
                        if a == sigma {
                            continue;
                        }
                        let rest = sigma.difference(a);
                        // b = rest ∪ c for every c ⊆ a, b ≠ σ
                        let extra = core::iter::once(Config::EMPTY).chain(a.nonempty_subsets());
                        for c in extra {
                            let b = rest.union(c);
                            if b == sigma || b.0 < a.0 {
                                continue;
                            }
                            let parts_cost = cost.facility_cost(m, a)? + cost.facility_cost(m, b)?;
                            if whole_cost > parts_cost + EPS_TIGHT {
                                out.push(SubadditivityViolation {
                                    whole: site(sigma),
                                    a: site(a),
                                    b: site(b),
                                    whole_cost,
                                    parts_cost,
                                });
                            }
                        }
                    }
                }
            }
        }
        _ => {
            let g = |k| cost.size_cost(k).unwrap();
            for k in 2..=s {
                for i in 1..k {
                    for j in i.max(k - i)..k {
                        let parts_cost = g(i) + g(j);
                        if g(k) > parts_cost + EPS_TIGHT {
                            out.push(SubadditivityViolation {
                                whole: CostSite::Size(k),
                                a: CostSite::Size(i),
                                b: CostSite::Size(j),
                                whole_cost: g(k),
                                parts_cost,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `f_m^a <= f_m^b` whenever `a ⊆ b`.
pub fn is_monotone(cost: &CostModel, metric: &MetricSpace) -> Result<bool> {
    let full = cost.full_config();
    match cost.kind() {
        CostKind::Table(_) => {
            for m in 0..metric.len() {
                for b in full.nonempty_subsets() {
                    let fb = cost.facility_cost(m, b)?;
                    for a in b.nonempty_subsets() {
                        if cost.facility_cost(m, a)? > fb + EPS_TIGHT {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
        _ => Ok((1..cost.num_commodities())
            .all(|k| cost.size_cost(k).unwrap() <= cost.size_cost(k + 1).unwrap() + EPS_TIGHT)),
    }
}
