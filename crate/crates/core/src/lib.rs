//! Online Multi-Commodity Facility Location (OMFLP).
//!
//! Requests arrive one at a time at points of a finite metric space, each
//! demanding a set of commodities. An online algorithm must irrevocably open
//! facilities (a point plus a configuration of commodities) and connect every
//! request to facilities that jointly offer what it demands.
//!
//! This crate is `no_std` (with `alloc`) and contains:
//!
//! * the instance and solution model with validation of the metric and cost
//!   assumptions ([`metric`], [`cost`], [`instance`], [`solution`]),
//! * the deterministic primal-dual algorithm with its constraint checkers
//!   ([`pd`]),
//! * the randomized cost-class algorithm ([`randomized`]),
//! * an exact brute-force offline optimum and the scaled dual-feasibility
//!   checker ([`oracle`]),
//! * the c-ordered covering greedy and its harmonic weight bound
//!   ([`ordered_cover`]),
//! * lower-bound and fuzz instance generators ([`adversary`]) and reference
//!   strategies ([`baselines`]).
#![no_std]

extern crate alloc;

pub mod adversary;
pub mod baselines;
pub mod config;
pub mod cost;
pub mod error;
pub mod instance;
pub mod metric;
pub mod oracle;
pub mod ordered_cover;
pub mod pd;
pub mod randomized;
pub mod solution;

pub use config::Config;
pub use cost::CostModel;
pub use error::{Error, Result};
pub use instance::{Instance, Request};
pub use metric::MetricSpace;
pub use solution::{Assignment, CostBreakdown, Facility, Solution};

/// Tolerance for metric axiom checks.
pub const EPS_METRIC: f64 = 1e-9;

/// Tolerance for constraint slack and event tie comparisons.
pub const EPS_TIGHT: f64 = 1e-9;

#[inline]
pub(crate) fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
