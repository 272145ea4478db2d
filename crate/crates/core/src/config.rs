//! JSON chain configuration files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "tenants": { "count": 2, "demand": [15000, 25000] },
//!   "nodes": {
//!     "vims": {
//!       "instances": [2, 3],
//!       "capacity": 10000,
//!       "rates": {
//!         "lambda_s": [{ "value": 175, "unit": "mtbf_hours" }, { "value": 175, "unit": "mtbf_hours" }],
//!         "mu_s": [{ "value": 30, "unit": "mttr_minutes" }, { "value": 30, "unit": "mttr_minutes" }],
//!         "lambda_v": { "value": 1.047e-7, "unit": "per_second" },
//!         "mu_v": { "value": 100, "unit": "mttr_minutes" },
//!         "lambda_h": { "value": 60000, "unit": "mtbf_hours" },
//!         "mu_h": { "value": 0.125, "unit": "per_hour" }
//!       }
//!     }
//!   },
//!   "chain": [{ "name": "PCSCF", "node": "vims", "cost": 1, "max_redundancy": 4 }],
//!   "targets": { "A0": 0.99999 }
//! }
//! ```
//!
//! Parsing is strict: unknown keys and unknown rate units are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainSpec, Subsystem};
use crate::mugf::PerfVector;
use crate::vnf::{RateScaling, RateSet, VnfSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    PerSecond,
    PerHour,
    /// Mean time between failures, in hours.
    MtbfHours,
    /// Mean time to repair, in minutes.
    MttrMinutes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rate {
    pub value: f64,
    pub unit: RateUnit,
}

impl Rate {
    pub fn per_second(&self) -> f64 {
        match self.unit {
            RateUnit::PerSecond => self.value,
            RateUnit::PerHour => self.value / 3600.0,
            RateUnit::MtbfHours => 1.0 / (self.value * 3600.0),
            RateUnit::MttrMinutes => 1.0 / (self.value * 60.0),
        }
    }

    /// Expresses a per-second rate in `unit`.
    pub fn from_per_second(rate: f64, unit: RateUnit) -> Self {
        let value = match unit {
            RateUnit::PerSecond => rate,
            RateUnit::PerHour => rate * 3600.0,
            RateUnit::MtbfHours => 1.0 / (rate * 3600.0),
            RateUnit::MttrMinutes => 1.0 / (rate * 60.0),
        };
        Self { value, unit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tenants {
    pub count: usize,
    /// Demand per tenant, in sessions.
    pub demand: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    pub lambda_s: Vec<Rate>,
    pub mu_s: Vec<Rate>,
    pub lambda_v: Rate,
    pub mu_v: Rate,
    pub lambda_h: Rate,
    pub mu_h: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeBlock {
    pub instances: Vec<u32>,
    /// Sessions per instance.
    pub capacity: u64,
    pub rates: Rates,
    #[serde(default, skip_serializing_if = "is_default_scaling")]
    pub scaling: RateScaling,
}

fn is_default_scaling(s: &RateScaling) -> bool {
    *s == RateScaling::Constant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEntry {
    pub name: String,
    /// Key into `nodes`.
    pub node: String,
    pub cost: f64,
    pub max_redundancy: u32,
    /// Node keys for individual parallel positions, overriding `node`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_node: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    #[serde(rename = "A0")]
    pub a0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub tenants: Tenants,
    pub nodes: BTreeMap<String, NodeBlock>,
    pub chain: Vec<ChainEntry>,
    pub targets: Targets,
}

impl ConfigFile {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let k = self.tenants.count;
        if k == 0 {
            return Err(invalid("tenants.count", "must be positive"));
        }
        if self.tenants.demand.len() != k {
            return Err(invalid("tenants.demand", format!("has {} entries for {k} tenants", self.tenants.demand.len())));
        }
        let a0 = self.targets.a0;
        if !(a0 > 0.0 && a0 < 1.0) {
            return Err(invalid("targets.A0", format!("must lie in (0, 1), got {a0}")));
        }
        if self.chain.is_empty() {
            return Err(invalid("chain", "must list at least one subsystem"));
        }
        for (name, node) in &self.nodes {
            let key = format!("nodes.{name}");
            if node.instances.len() != k {
                return Err(invalid(format!("{key}.instances"), format!("has {} entries for {k} tenants", node.instances.len())));
            }
            for (field, list) in [("lambda_s", &node.rates.lambda_s), ("mu_s", &node.rates.mu_s)] {
                if list.len() != k {
                    return Err(invalid(format!("{key}.rates.{field}"), format!("has {} entries for {k} tenants", list.len())));
                }
            }
            let r = &node.rates;
            let singles = [("lambda_v", &r.lambda_v), ("mu_v", &r.mu_v), ("lambda_h", &r.lambda_h), ("mu_h", &r.mu_h)];
            let all = singles
                .into_iter()
                .chain(r.lambda_s.iter().map(|x| ("lambda_s", x)))
                .chain(r.mu_s.iter().map(|x| ("mu_s", x)));
            for (field, rate) in all {
                let v = rate.per_second();
                if !(rate.value > 0.0 && v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{key}.rates.{field}"), format!("value {} is not a positive rate", rate.value)));
                }
            }
            if let Err(e) = self.node_spec(node).validate() {
                return Err(invalid(key, e.to_string()));
            }
        }
        for (m, entry) in self.chain.iter().enumerate() {
            let key = format!("chain[{m}]");
            for node in std::iter::once(&entry.node).chain(&entry.per_node) {
                if !self.nodes.contains_key(node) {
                    return Err(invalid(format!("{key}.node"), format!("unknown node '{node}'")));
                }
            }
            if entry.max_redundancy == 0 {
                return Err(invalid(format!("{key}.max_redundancy"), "must be at least 1"));
            }
            if !(entry.cost >= 0.0 && entry.cost.is_finite()) {
                return Err(invalid(format!("{key}.cost"), format!("must be non-negative, got {}", entry.cost)));
            }
        }
        Ok(())
    }

    fn node_spec(&self, node: &NodeBlock) -> VnfSpec {
        let r = &node.rates;
        VnfSpec {
            instances: node.instances.clone(),
            capacity: node.capacity,
            rates: RateSet {
                lambda_s: r.lambda_s.iter().map(Rate::per_second).collect(),
                mu_s: r.mu_s.iter().map(Rate::per_second).collect(),
                lambda_v: r.lambda_v.per_second(),
                mu_v: r.mu_v.per_second(),
                lambda_h: r.lambda_h.per_second(),
                mu_h: r.mu_h.per_second(),
            },
            scaling: node.scaling,
        }
    }

    /// Internal chain model with all rates converted to per second.
    pub fn chain_spec(&self) -> ChainSpec {
        let subsystems = self
            .chain
            .iter()
            .map(|entry| Subsystem {
                name: entry.name.clone(),
                node: self.node_spec(&self.nodes[&entry.node]),
                node_cost: entry.cost,
                max_redundancy: entry.max_redundancy,
                per_node: entry.per_node.iter().map(|n| self.node_spec(&self.nodes[n])).collect(),
            })
            .collect();
        ChainSpec { subsystems, demand: PerfVector::new(self.tenants.demand.clone()) }
    }

    /// Sets every subsystem's redundancy bound.
    pub fn set_max_redundancy(&mut self, max: u32) {
        self.chain.iter_mut().for_each(|e| e.max_redundancy = max);
    }
}
