//! Steady-state availability of multi-tenant service function chains.
//!
//! Each network function node is a multi-state CTMC ([`vnf`], [`ctmc`])
//! whose stationary performance distribution is composed with the others
//! through multidimensional universal generating functions ([`mugf`],
//! [`chain`]).
//!
//! The redundancy optimizer ([`optimizer`]) and the rate sweeps
//! ([`sensitivity`]) build on the chain evaluator. [`sim`] estimates the
//! same availability by Monte Carlo as an independent check.

pub mod chain;
pub mod config;
pub mod ctmc;
pub mod error;
pub mod mugf;
pub mod optimizer;
pub mod report;
pub mod sensitivity;
pub mod sim;
pub mod vnf;

pub use chain::{evaluate_chain, state_space_size, ChainEvaluator, ChainResult, ChainSpec, RedundancyVector, Subsystem};
pub use error::{Error, Result};
pub use mugf::{parallel_compose, series_compose, PerfDistribution, PerfVector};
pub use optimizer::{demand_sweep, optimize, Outcome};
pub use vnf::{node_distribution, RateSet, VnfSpec};
