//! Series-parallel service chains.
//!
//! A chain is an ordered series of subsystems; subsystem `m` runs `l_m`
//! parallel nodes with flow dispersion. The whole-chain performance vector
//! is the element-wise minimum over subsystems of the per-subsystem sums.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mugf::{PerfDistribution, PerfVector};
use crate::vnf::{node_distribution, VnfSpec};

/// One stage of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    /// Model shared by the parallel nodes of this subsystem.
    pub node: VnfSpec,
    /// Cost of one node.
    pub node_cost: f64,
    pub max_redundancy: u32,
    /// Optional per-position overrides: node `l` (zero-based) uses
    /// `per_node[l]` when present and `node` otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_node: Vec<VnfSpec>,
}

impl Subsystem {
    pub fn homogeneous(name: impl Into<String>, node: VnfSpec, node_cost: f64, max_redundancy: u32) -> Self {
        Self { name: name.into(), node, node_cost, max_redundancy, per_node: Vec::new() }
    }

    /// Spec of the parallel node at zero-based position `position`.
    pub fn node_at(&self, position: usize) -> &VnfSpec {
        self.per_node.get(position).unwrap_or(&self.node)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub subsystems: Vec<Subsystem>,
    /// Per-tenant demand `w`.
    pub demand: PerfVector,
}

impl ChainSpec {
    pub fn tenants(&self) -> usize {
        self.demand.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.subsystems.is_empty() {
            return Err(Error::InvalidSpec("chain has no subsystems".into()));
        }
        let k = self.tenants();
        for sub in &self.subsystems {
            for node in std::iter::once(&sub.node).chain(&sub.per_node) {
                node.validate()?;
                if node.tenants() != k {
                    return Err(Error::DimensionMismatch { expected: k, found: node.tenants() });
                }
            }
            if sub.max_redundancy == 0 {
                return Err(Error::InvalidSpec(format!("subsystem {} has max_redundancy 0", sub.name)));
            }
            if !(sub.node_cost >= 0.0 && sub.node_cost.is_finite()) {
                return Err(Error::InvalidSpec(format!("subsystem {} has cost {}", sub.name, sub.node_cost)));
            }
        }
        Ok(())
    }

    /// Same chain with every node spec passed through `f`.
    pub fn map_nodes(&self, mut f: impl FnMut(&VnfSpec) -> VnfSpec) -> Self {
        let subsystems = self
            .subsystems
            .iter()
            .map(|s| Subsystem {
                node: f(&s.node),
                per_node: s.per_node.iter().map(&mut f).collect(),
                ..s.clone()
            })
            .collect();
        Self { subsystems, demand: self.demand.clone() }
    }

    /// The all-ones redundancy vector.
    pub fn minimal_redundancy(&self) -> RedundancyVector {
        RedundancyVector(vec![1; self.subsystems.len()])
    }

    pub fn check_redundancy(&self, l: &RedundancyVector) -> Result<()> {
        if l.len() != self.subsystems.len() {
            return Err(Error::InvalidRedundancy(format!(
                "has {} entries for {} subsystems",
                l.len(),
                self.subsystems.len()
            )));
        }
        for (m, (&lm, sub)) in l.0.iter().zip(&self.subsystems).enumerate() {
            if lm == 0 || lm > sub.max_redundancy {
                return Err(Error::InvalidRedundancy(format!(
                    "entry {m} ({}) = {lm} outside [1, {}]",
                    sub.name, sub.max_redundancy
                )));
            }
        }
        Ok(())
    }

    pub fn cost(&self, l: &RedundancyVector) -> f64 {
        l.0.iter().zip(&self.subsystems).map(|(&lm, s)| lm as f64 * s.node_cost).sum()
    }
}

/// Parallel node count per subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RedundancyVector(pub Vec<u32>);

impl RedundancyVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Component-wise `self ≤ other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for RedundancyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for RedundancyVector {
    type Err = String;

    /// Parses `2,3,3,3,3` (optionally parenthesized).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad entry '{p}': {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RedundancyVector)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub distribution: PerfDistribution,
    pub availability: f64,
    pub cost: f64,
    /// Number of joint states of the whole-chain CTMC, never enumerated.
    pub state_space: BigUint,
}

/// Exact joint state count `Π_m Π_l N^{(m,l)}`.
pub fn state_space_size(spec: &ChainSpec, l: &RedundancyVector) -> BigUint {
    let mut j = BigUint::from(1u32);
    for (&lm, sub) in l.0.iter().zip(&spec.subsystems) {
        for position in 0..lm as usize {
            j *= BigUint::from(sub.node_at(position).state_count());
        }
    }
    j
}

/// Memoized subsystem distributions for every redundancy level up to each
/// subsystem's `max_redundancy`.
///
/// Node distributions are solved once per distinct node spec and subsystem
/// level `l` is obtained from level `l − 1` by one binary parallel step.
#[derive(Debug, Clone)]
pub struct ChainEvaluator {
    spec: ChainSpec,
    levels: Vec<Vec<PerfDistribution>>,
}

impl ChainEvaluator {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let mut solved: Vec<(VnfSpec, PerfDistribution)> = Vec::new();
        let mut node_dist = |node: &VnfSpec| -> Result<PerfDistribution> {
            if let Some((_, d)) = solved.iter().find(|(s, _)| s == node) {
                return Ok(d.clone());
            }
            let d = node_distribution(node)?;
            solved.push((node.clone(), d.clone()));
            Ok(d)
        };
        let mut levels = Vec::with_capacity(spec.subsystems.len());
        for sub in &spec.subsystems {
            let mut table: Vec<PerfDistribution> = Vec::with_capacity(sub.max_redundancy as usize);
            for position in 0..sub.max_redundancy as usize {
                let node = node_dist(sub.node_at(position))?;
                let next = match table.last() {
                    Some(prev) => prev.parallel(&node)?,
                    None => node,
                };
                table.push(next);
            }
            levels.push(table);
        }
        Ok(Self { spec: spec.clone(), levels })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    /// Same subsystem tables evaluated against another demand vector.
    pub fn with_demand(&self, demand: PerfVector) -> Self {
        let mut spec = self.spec.clone();
        spec.demand = demand;
        Self { spec, levels: self.levels.clone() }
    }

    /// Distribution of subsystem `m` with `lm` parallel nodes.
    pub fn subsystem_distribution(&self, m: usize, lm: u32) -> &PerfDistribution {
        &self.levels[m][lm as usize - 1]
    }

    pub fn distribution(&self, l: &RedundancyVector) -> Result<PerfDistribution> {
        self.spec.check_redundancy(l)?;
        let mut parts = l.0.iter().enumerate().map(|(m, &lm)| self.subsystem_distribution(m, lm));
        let first = parts.next().expect("validated non-empty").clone();
        parts.try_fold(first, |acc, d| acc.series(d))
    }

    pub fn availability(&self, l: &RedundancyVector) -> Result<f64> {
        self.distribution(l)?.availability(&self.spec.demand)
    }

    pub fn evaluate(&self, l: &RedundancyVector) -> Result<ChainResult> {
        let distribution = self.distribution(l)?;
        let availability = distribution.availability(&self.spec.demand)?;
        Ok(ChainResult {
            distribution,
            availability,
            cost: self.spec.cost(l),
            state_space: state_space_size(&self.spec, l),
        })
    }
}

/// Evaluates one configuration of the chain.
pub fn evaluate_chain(spec: &ChainSpec, l: &RedundancyVector) -> Result<ChainResult> {
    spec.check_redundancy(l)?;
    // Levels above l_m are never needed.
    let trimmed = ChainSpec {
        subsystems: spec
            .subsystems
            .iter()
            .zip(&l.0)
            .map(|(s, &lm)| Subsystem { max_redundancy: lm, ..s.clone() })
            .collect(),
        demand: spec.demand.clone(),
    };
    let mut result = ChainEvaluator::new(&trimmed)?.evaluate(l)?;
    result.cost = spec.cost(l);
    Ok(result)
}
