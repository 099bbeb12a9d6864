use alloc::string::String;

use crate::Config;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquareMatrix {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("metric space has no points")]
    EmptyMetric,
    #[error("line metric needs at least one coordinate")]
    EmptyCoordinates,
    #[error("no construction cost for configuration {config} at point {point}")]
    MissingCost { point: usize, config: Config },
    #[error("construction cost {cost} for configuration {config} at point {point} is not positive")]
    NonPositiveCost {
        point: usize,
        config: Config,
        cost: f64,
    },
    #[error("size-based cost table has {got} entries but there are {expected} commodities")]
    SizeTableLength { got: usize, expected: usize },
    #[error("poly cost exponent {0} outside [0, 2]")]
    ExponentOutOfRange(f64),
    #[error("configuration is empty")]
    EmptyConfig,
    #[error("configuration {config} is not a subset of the {num_commodities} commodities")]
    ConfigOutOfRange {
        config: Config,
        num_commodities: usize,
    },
    #[error("number of commodities {0} is outside 1..=64")]
    CommodityCount(usize),
    #[error("request {request} references unknown point {point}")]
    UnknownPoint { request: usize, point: usize },
    #[error("request {request} demands no commodity")]
    EmptyRequest { request: usize },
    #[error("request {request} demands commodity outside 0..{num_commodities}")]
    RequestCommodityOutOfRange {
        request: usize,
        num_commodities: usize,
    },
    #[error("request at position {position} has arrival index {arrival}")]
    ArrivalOrder { position: usize, arrival: usize },
    #[error("request {request} leaves commodity {commodity} uncovered")]
    Infeasible { request: usize, commodity: usize },
    #[error("solution has {got} assignments for {expected} requests")]
    AssignmentCount { got: usize, expected: usize },
    #[error("{0} is not a perfect square")]
    NotPerfectSquare(usize),
    #[error("no acceptable instance after {0} attempts; try different parameters")]
    RejectionBudgetExhausted(usize),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("instance exceeds oracle limits: {0}")]
    OracleLimit(String),
    #[error("cost model is not subadditive; one facility per point is not without loss of generality")]
    NotSubadditive,
    #[error("invalid c-ordered covering instance: {0}")]
    InvalidCOrdered(String),
}
