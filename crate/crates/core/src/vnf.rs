//! Multi-state performance model of a single virtualized network function.
//!
//! A node hosts `K` tenants; tenant `i` runs `n_i` identical software
//! instances of capacity `γ` sessions each, on top of a shared
//! virtualization layer and a shared hardware layer. The node CTMC has one
//! state per vector of active-instance counts plus the two layer-failure
//! states [`VnfState::Vlf`] and [`VnfState::Hlf`].

use serde::{Deserialize, Serialize};

use crate::ctmc::{self, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::mugf::{PerfDistribution, PerfVector};

/// Default cap on the number of node states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Failure and repair rates of one node, all per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    /// Software failure rate per tenant.
    pub lambda_s: Vec<f64>,
    /// Software repair rate per tenant.
    pub mu_s: Vec<f64>,
    pub lambda_v: f64,
    pub mu_v: f64,
    pub lambda_h: f64,
    pub mu_h: f64,
}

impl RateSet {
    /// Same software rates for every one of `tenants` tenants.
    pub fn uniform(
        tenants: usize,
        lambda_s: f64,
        mu_s: f64,
        lambda_v: f64,
        mu_v: f64,
        lambda_h: f64,
        mu_h: f64,
    ) -> Self {
        Self {
            lambda_s: vec![lambda_s; tenants],
            mu_s: vec![mu_s; tenants],
            lambda_v,
            mu_v,
            lambda_h,
            mu_h,
        }
    }

    fn validate(&self) -> Result<()> {
        let named = [
            ("lambda_v", self.lambda_v),
            ("mu_v", self.mu_v),
            ("lambda_h", self.lambda_h),
            ("mu_h", self.mu_h),
        ];
        let all = named
            .into_iter()
            .chain(self.lambda_s.iter().map(|&r| ("lambda_s", r)))
            .chain(self.mu_s.iter().map(|&r| ("mu_s", r)));
        for (name, rate) in all {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive, got {rate}")));
            }
        }
        Ok(())
    }
}

/// How software failure and repair rates depend on the instance counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateScaling {
    /// One failure at rate `λ_s` and one repair at rate `μ_s` per tenant,
    /// whatever the number of active instances.
    #[default]
    Constant,
    /// Failure rate `α_i·λ_s` and repair rate `(n_i − α_i)·μ_s`.
    PerInstance,
}

/// Parameters of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VnfSpec {
    /// Instances per tenant, `n = (n_1, …, n_K)`.
    pub instances: Vec<u32>,
    /// Serving capacity of one instance, in sessions.
    pub capacity: u64,
    pub rates: RateSet,
    #[serde(default)]
    pub scaling: RateScaling,
}

impl VnfSpec {
    pub fn new(instances: Vec<u32>, capacity: u64, rates: RateSet) -> Result<Self> {
        let spec = Self { instances, capacity, rates, scaling: RateScaling::Constant };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_scaling(mut self, scaling: RateScaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn tenants(&self) -> usize {
        self.instances.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.instances.len();
        if k == 0 {
            return Err(Error::InvalidSpec("at least one tenant is required".into()));
        }
        if self.rates.lambda_s.len() != k || self.rates.mu_s.len() != k {
            return Err(Error::InvalidSpec(format!(
                "{k} tenants but {} software failure and {} repair rates",
                self.rates.lambda_s.len(),
                self.rates.mu_s.len()
            )));
        }
        if let Some(i) = self.instances.iter().position(|&n| n == 0) {
            return Err(Error::InvalidSpec(format!("tenant {i} has no instances")));
        }
        if self.capacity == 0 {
            return Err(Error::InvalidSpec("capacity per instance must be positive".into()));
        }
        self.rates.validate()
    }

    /// Node state count `Π(n_i + 1) + 2`, without overflow.
    pub fn state_count(&self) -> u128 {
        self.instances
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128 + 1))
            .and_then(|p| p.checked_add(2))
            .unwrap_or(u128::MAX)
    }
}

/// A node state: active-instance counts, or one of the layer failures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VnfState {
    Working(Vec<u32>),
    /// Virtualization layer failure.
    Vlf,
    /// Hardware layer failure.
    Hlf,
}

/// Ordered node state space: all count vectors in lexicographic order,
/// then VLF, then HLF.
#[derive(Debug, Clone, PartialEq)]
pub struct VnfStateSpace {
    instances: Vec<u32>,
    states: Vec<VnfState>,
}

impl VnfStateSpace {
    pub fn states(&self) -> &[VnfState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn vlf_index(&self) -> usize {
        self.states.len() - 2
    }

    pub fn hlf_index(&self) -> usize {
        self.states.len() - 1
    }

    /// Index of the working state with counts `alpha`.
    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        if alpha.len() != self.instances.len() {
            return None;
        }
        let mut index = 0usize;
        for (&a, &n) in alpha.iter().zip(&self.instances) {
            if a > n {
                return None;
            }
            index = index * (n as usize + 1) + a as usize;
        }
        Some(index)
    }

    /// Index of the fully-working state `(n_1, …, n_K)`.
    pub fn full_index(&self) -> usize {
        self.vlf_index() - 1
    }
}

pub fn enumerate_states(spec: &VnfSpec) -> Result<VnfStateSpace> {
    enumerate_states_with_cap(spec, DEFAULT_STATE_CAP)
}

pub fn enumerate_states_with_cap(spec: &VnfSpec, cap: usize) -> Result<VnfStateSpace> {
    spec.validate()?;
    let count = spec.state_count();
    if count > cap as u128 {
        return Err(Error::StateSpaceTooLarge { count, cap });
    }
    let mut states = Vec::with_capacity(count as usize);
    let mut alpha = vec![0u32; spec.tenants()];
    'outer: loop {
        states.push(VnfState::Working(alpha.clone()));
        // odometer increment, last coordinate fastest
        for i in (0..alpha.len()).rev() {
            if alpha[i] < spec.instances[i] {
                alpha[i] += 1;
                continue 'outer;
            }
            alpha[i] = 0;
        }
        break;
    }
    states.push(VnfState::Vlf);
    states.push(VnfState::Hlf);
    Ok(VnfStateSpace { instances: spec.instances.clone(), states })
}

/// Builds the node generator over [`enumerate_states`] order.
pub fn build_vnf_generator(spec: &VnfSpec) -> Result<GeneratorMatrix> {
    let space = enumerate_states(spec)?;
    build_generator_over(spec, &space)
}

fn build_generator_over(spec: &VnfSpec, space: &VnfStateSpace) -> Result<GeneratorMatrix> {
    let rates = &spec.rates;
    let vlf = space.vlf_index();
    let hlf = space.hlf_index();
    let full = space.full_index();
    let mut transitions = Vec::new();
    for (from, state) in space.states().iter().enumerate() {
        let VnfState::Working(alpha) = state else { continue };
        let mut next = alpha.clone();
        for i in 0..alpha.len() {
            let (a, n) = (alpha[i], spec.instances[i]);
            let (fail, repair) = match spec.scaling {
                RateScaling::Constant => (rates.lambda_s[i], rates.mu_s[i]),
                RateScaling::PerInstance => {
                    (a as f64 * rates.lambda_s[i], (n - a) as f64 * rates.mu_s[i])
                }
            };
            if a > 0 {
                next[i] = a - 1;
                transitions.push((from, space.index_of(&next).expect("in range"), fail));
            }
            if a < n {
                next[i] = a + 1;
                transitions.push((from, space.index_of(&next).expect("in range"), repair));
            }
            next[i] = a;
        }
        transitions.push((from, vlf, rates.lambda_v));
        transitions.push((from, hlf, rates.lambda_h));
    }
    transitions.push((vlf, hlf, rates.lambda_h));
    transitions.push((vlf, full, rates.mu_v));
    transitions.push((hlf, full, rates.mu_h));
    ctmc::build_generator(space.len(), transitions)
}

/// Performance vector of every state: `γ·α` for working states, zero for
/// VLF and HLF.
pub fn performance_map(spec: &VnfSpec) -> Result<Vec<PerfVector>> {
    let space = enumerate_states(spec)?;
    Ok(performance_over(spec, &space))
}

fn performance_over(spec: &VnfSpec, space: &VnfStateSpace) -> Vec<PerfVector> {
    space
        .states()
        .iter()
        .map(|state| match state {
            VnfState::Working(alpha) => {
                PerfVector::new(alpha.iter().map(|&a| a as u64 * spec.capacity).collect())
            }
            VnfState::Vlf | VnfState::Hlf => PerfVector::zero(spec.tenants()),
        })
        .collect()
}

/// Everything derived from one node spec: states, generator, stationary
/// probabilities and per-state performance.
#[derive(Debug, Clone)]
pub struct NodeModel {
    pub space: VnfStateSpace,
    pub generator: GeneratorMatrix,
    pub probabilities: Vec<f64>,
    pub performance: Vec<PerfVector>,
}

impl NodeModel {
    pub fn solve(spec: &VnfSpec) -> Result<Self> {
        let space = enumerate_states(spec)?;
        let generator = build_generator_over(spec, &space)?;
        let probabilities = ctmc::steady_state(&generator)?.into_inner();
        let performance = performance_over(spec, &space);
        Ok(Self { space, generator, probabilities, performance })
    }

    pub fn distribution(&self) -> PerfDistribution {
        PerfDistribution::merge_terms(
            self.performance[0].dim(),
            self.performance.iter().cloned().zip(self.probabilities.iter().copied()),
        )
        .expect("node performance vectors share one dimension")
    }
}

/// Steady-state performance distribution of one node, with states of equal
/// performance merged.
pub fn node_distribution(spec: &VnfSpec) -> Result<PerfDistribution> {
    Ok(NodeModel::solve(spec)?.distribution())
}
