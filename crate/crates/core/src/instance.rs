//! Requests and instances.

use alloc::vec::Vec;

use crate::{Config, CostModel, Error, MetricSpace, Result};

/// A request at `point` demanding `commodities`.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub point: usize,
    pub commodities: Config,
    pub arrival_index: usize,
}

/// Metric, cost model and the ordered request sequence.
///
/// Requests are validated on construction: each demands a nonempty subset of
/// `0..|S|` at a known point, and arrival indices run `0, 1, ..`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    metric: MetricSpace,
    cost: CostModel,
    requests: Vec<Request>,
    known_opt_upper_bound: Option<f64>,
}

impl Instance {
    pub fn new(metric: MetricSpace, cost: CostModel, requests: Vec<Request>) -> Result<Self> {
        let full = cost.full_config();
        for (position, r) in requests.iter().enumerate() {
            if r.arrival_index != position {
                return Err(Error::ArrivalOrder {
                    position,
                    arrival: r.arrival_index,
                });
            }
            if r.point >= metric.len() {
                return Err(Error::UnknownPoint {
                    request: position,
                    point: r.point,
                });
            }
            if r.commodities.is_empty() {
                return Err(Error::EmptyRequest { request: position });
            }
            if !r.commodities.is_subset(full) {
                return Err(Error::RequestCommodityOutOfRange {
                    request: position,
                    num_commodities: cost.num_commodities(),
                });
            }
        }
        Ok(Instance {
            metric,
            cost,
            requests,
            known_opt_upper_bound: None,
        })
    }

    /// Builds requests from `(point, commodities)` pairs in arrival order.
    pub fn from_demands<I>(metric: MetricSpace, cost: CostModel, demands: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Config)>,
    {
        let requests = demands
            .into_iter()
            .enumerate()
            .map(|(arrival_index, (point, commodities))| Request {
                point,
                commodities,
                arrival_index,
            })
            .collect();
        Self::new(metric, cost, requests)
    }

    #[must_use]
    pub fn with_opt_upper_bound(mut self, bound: Option<f64>) -> Self {
        self.known_opt_upper_bound = bound;
        self
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn num_requests(&self) -> usize {
        self.requests.len()
    }

    pub fn num_points(&self) -> usize {
        self.metric.len()
    }

    pub fn num_commodities(&self) -> usize {
        self.cost.num_commodities()
    }

    pub fn full_config(&self) -> Config {
        self.cost.full_config()
    }

    pub fn known_opt_upper_bound(&self) -> Option<f64> {
        self.known_opt_upper_bound
    }

    #[inline]
    pub fn dist(&self, m: usize, r: &Request) -> f64 {
        self.metric.dist(m, r.point)
    }

    /// Total number of demanded (request, commodity) pairs.
    pub fn demand_count(&self) -> usize {
        self.requests.iter().map(|r| r.commodities.len()).sum()
    }
}
