//! JSON documents for instances, solutions and algorithm traces.

use std::collections::BTreeMap;

use omflp_core::cost::CostKind;
use omflp_core::metric::build_line_metric;
use omflp_core::pd::TraceRecord;
use omflp_core::randomized::{RandRun, Route, Tau};
use omflp_core::{Assignment, Config, CostModel, Facility, Instance, MetricSpace, Request, Solution};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("commodity {commodity} out of range for |S| = {num_commodities}")]
    Commodity { commodity: usize, num_commodities: usize },
    #[error("size table has {got} entries, expected {expected}")]
    SizeTable { got: usize, expected: usize },
    #[error("metric axioms violated: {0}")]
    Metric(String),
    #[error(transparent)]
    Model(#[from] omflp_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// A number written as a JSON number, a decimal string or a `"p/q"` string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn value(&self) -> Result<f64> {
        match self {
            Num::Float(v) => Ok(*v),
            Num::Text(s) => parse_number(s),
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Float(v)
    }
}

/// Parses `"3"`, `"-0.25"` or `"7/3"`.
pub fn parse_number(s: &str) -> Result<f64> {
    let bad = || FormatError::Number(s.to_string());
    let t = s.trim();
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointId {
    Int(u64),
    Text(String),
}

impl PointId {
    fn key(&self) -> String {
        match self {
            PointId::Int(i) => i.to_string(),
            PointId::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricDoc {
    Matrix { dist: Vec<Vec<Num>> },
    Line { coords: Vec<Num> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEntry {
    pub point: PointId,
    pub config: Vec<usize>,
    pub cost: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostDoc {
    Table { entries: Vec<CostEntry> },
    SizeBased { g: Vec<Num> },
    Poly { x: Num },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    pub point: PointId,
    pub commodities: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub points: Vec<PointId>,
    pub metric: MetricDoc,
    pub num_commodities: usize,
    pub cost: CostDoc,
    pub requests: Vec<RequestDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_upper_bound: Option<Num>,
}

fn config_of(indices: &[usize], num_commodities: usize) -> Result<Config> {
    for &commodity in indices {
        if commodity >= num_commodities {
            return Err(FormatError::Commodity {
                commodity,
                num_commodities,
            });
        }
    }
    Ok(Config::from_indices(indices.iter().copied()))
}

fn nums(v: &[Num]) -> Result<Vec<f64>> {
    v.iter().map(Num::value).collect()
}

impl InstanceDoc {
    /// Converts to an instance, checking structure first and then the
    /// metric axioms.
    pub fn to_instance(&self) -> Result<Instance> {
        let ids: Vec<String> = self.points.iter().map(PointId::key).collect();
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(FormatError::DuplicatePoint(id.clone()));
            }
        }
        let lookup = |p: &PointId| {
            let k = p.key();
            index.get(&k).copied().ok_or(FormatError::UnknownPoint(k))
        };
        let metric = match &self.metric {
            MetricDoc::Matrix { dist } => {
                let dist = dist.iter().map(|row| nums(row)).collect::<Result<Vec<_>>>()?;
                MetricSpace::from_matrix(ids.clone(), dist)?
            }
            MetricDoc::Line { coords } => build_line_metric(&nums(coords)?)?.with_point_ids(ids.clone())?,
        };
        let s = self.num_commodities;
        let cost = match &self.cost {
            CostDoc::Table { entries } => {
                let mut table = BTreeMap::new();
                for e in entries {
                    table.insert((lookup(&e.point)?, config_of(&e.config, s)?), e.cost.value()?);
                }
                CostModel::table(s, table)?
            }
            CostDoc::SizeBased { g } => {
                if g.len() != s {
                    return Err(FormatError::SizeTable {
                        got: g.len(),
                        expected: s,
                    });
                }
                CostModel::size_based(nums(g)?)?
            }
            CostDoc::Poly { x } => CostModel::poly(s, x.value()?)?,
        };
        let requests = self
            .requests
            .iter()
            .enumerate()
            .map(|(arrival_index, r)| {
                Ok(Request {
                    point: lookup(&r.point)?,
                    commodities: config_of(&r.commodities, s)?,
                    arrival_index,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bound = self.opt_upper_bound.as_ref().map(Num::value).transpose()?;
        let violations = metric.validate();
        if let Some(v) = violations.first() {
            return Err(FormatError::Metric(format!("{v:?} ({} total)", violations.len())));
        }
        Ok(Instance::new(metric, cost, requests)?.with_opt_upper_bound(bound))
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let ids = inst.metric().point_ids();
        let pid = |m: usize| PointId::Text(ids[m].clone());
        let metric = match inst.metric().coords() {
            Some(c) => MetricDoc::Line {
                coords: c.iter().map(|&v| v.into()).collect(),
            },
            None => MetricDoc::Matrix {
                dist: inst
                    .metric()
                    .matrix()
                    .iter()
                    .map(|row| row.iter().map(|&v| v.into()).collect())
                    .collect(),
            },
        };
        let cost = match inst.cost().kind() {
            CostKind::Table(t) => CostDoc::Table {
                entries: t
                    .iter()
                    .map(|(&(m, c), &v)| CostEntry {
                        point: pid(m),
                        config: c.iter().collect(),
                        cost: v.into(),
                    })
                    .collect(),
            },
            CostKind::SizeBased(g) => CostDoc::SizeBased {
                g: g.iter().map(|&v| v.into()).collect(),
            },
            CostKind::Poly(x) => CostDoc::Poly { x: (*x).into() },
        };
        InstanceDoc {
            points: ids.iter().cloned().map(PointId::Text).collect(),
            metric,
            num_commodities: inst.num_commodities(),
            cost,
            requests: inst
                .requests()
                .iter()
                .map(|r| RequestDoc {
                    point: pid(r.point),
                    commodities: r.commodities.iter().collect(),
                })
                .collect(),
            opt_upper_bound: inst.known_opt_upper_bound().map(Num::from),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceDoc>(text)?.to_instance()
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityDoc {
    pub id: usize,
    pub point: String,
    pub config: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionDoc {
    pub facility: usize,
    pub commodities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentDoc {
    pub request: usize,
    pub connections: Vec<ConnectionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub facilities: Vec<FacilityDoc>,
    pub assignments: Vec<AssignmentDoc>,
}

impl SolutionDoc {
    pub fn from_solution(inst: &Instance, sol: &Solution) -> Self {
        let ids = inst.metric().point_ids();
        SolutionDoc {
            facilities: sol
                .facilities
                .iter()
                .map(|f| FacilityDoc {
                    id: f.id,
                    point: ids[f.point].clone(),
                    config: f.config.iter().collect(),
                    cost: f.paid_cost,
                })
                .collect(),
            assignments: sol
                .assignments
                .iter()
                .map(|a| AssignmentDoc {
                    request: a.request_index,
                    connections: a
                        .connections
                        .iter()
                        .map(|&(f, c)| ConnectionDoc {
                            facility: f,
                            commodities: c.iter().collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_solution(&self, inst: &Instance) -> Result<Solution> {
        let s = inst.num_commodities();
        let facilities = self
            .facilities
            .iter()
            .map(|f| {
                Ok(Facility {
                    id: f.id,
                    point: inst
                        .metric()
                        .point_index(&f.point)
                        .ok_or_else(|| FormatError::UnknownPoint(f.point.clone()))?,
                    config: config_of(&f.config, s)?,
                    paid_cost: f.cost,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let assignments = self
            .assignments
            .iter()
            .map(|a| {
                Ok(Assignment {
                    request_index: a.request,
                    connections: a
                        .connections
                        .iter()
                        .map(|c| Ok((c.facility, config_of(&c.commodities, s)?)))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution {
            facilities,
            assignments,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdEventDoc {
    pub request: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commodity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    pub raise: f64,
    pub dual_sum: f64,
}

pub fn pd_trace_doc(inst: &Instance, trace: &[TraceRecord]) -> Vec<PdEventDoc> {
    let ids = inst.metric().point_ids();
    trace
        .iter()
        .map(|t| PdEventDoc {
            request: t.request,
            kind: t.kind.name(),
            commodity: t.commodity,
            point: t.point.map(|m| ids[m].clone()),
            raise: t.raise,
            dual_sum: t.dual_sum,
        })
        .collect()
}

fn tau_name(t: Tau) -> String {
    match t {
        Tau::Small(e) => format!("{{{e}}}"),
        Tau::Large => "S".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoinDoc {
    pub tau: String,
    pub class: usize,
    pub p: f64,
    pub outcome: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opened: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandRequestDoc {
    pub request: usize,
    pub x: f64,
    pub z: f64,
    pub x_by_commodity: Vec<(usize, f64)>,
    pub coins: Vec<CoinDoc>,
    pub fallback: Vec<usize>,
    pub route: &'static str,
    pub connections: Vec<ConnectionDoc>,
}

pub fn rand_trace_doc(run: &RandRun) -> Vec<RandRequestDoc> {
    run.trace
        .iter()
        .map(|t| RandRequestDoc {
            request: t.request,
            x: t.budgets.x,
            z: t.budgets.z,
            x_by_commodity: t.budgets.x_map.clone(),
            coins: t
                .coins
                .iter()
                .map(|c| CoinDoc {
                    tau: tau_name(c.tau),
                    class: c.class,
                    p: c.p,
                    outcome: c.outcome,
                    opened: c.opened,
                })
                .collect(),
            fallback: t.fallback.clone(),
            route: match t.route {
                Route::Large => "large",
                Route::Small => "small",
            },
            connections: t
                .connections
                .iter()
                .map(|&(f, c)| ConnectionDoc {
                    facility: f,
                    commodities: c.iter().collect(),
                })
                .collect(),
        })
        .collect()
}
