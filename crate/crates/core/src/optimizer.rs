//! Exhaustive minimal-cost redundancy allocation under an availability
//! requirement.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{ChainEvaluator, ChainSpec, RedundancyVector};
use crate::error::{Error, Result};
use crate::mugf::PerfVector;

/// Largest number of configurations [`optimize`] will enumerate.
pub const SEARCH_GUARD: u128 = 1_000_000;

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub l: RedundancyVector,
    pub cost: f64,
    pub availability: f64,
    pub feasible: bool,
}

/// All minimal-cost feasible configurations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub target: f64,
    /// Lexicographically sorted.
    pub optima: Vec<RedundancyVector>,
    pub min_cost: f64,
    /// Availability of each optimum, aligned with `optima`.
    pub availabilities: Vec<f64>,
    pub evaluated_count: usize,
    pub feasible_count: usize,
    #[serde(skip)]
    pub evaluations: Vec<Evaluation>,
}

/// No configuration in the search box met the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Infeasible {
    pub target: f64,
    pub best: RedundancyVector,
    pub best_availability: f64,
    pub evaluated_count: usize,
    #[serde(skip)]
    pub evaluations: Vec<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Optimal(OptimizationResult),
    Infeasible(Infeasible),
}

impl Outcome {
    pub fn evaluations(&self) -> &[Evaluation] {
        match self {
            Outcome::Optimal(r) => &r.evaluations,
            Outcome::Infeasible(r) => &r.evaluations,
        }
    }

    pub fn optimal(&self) -> Option<&OptimizationResult> {
        match self {
            Outcome::Optimal(r) => Some(r),
            Outcome::Infeasible(_) => None,
        }
    }
}

fn costs_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn check_target(target: f64) -> Result<()> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidTarget(target));
    }
    Ok(())
}

/// Redundancy vector at lexicographic position `index` of the box
/// `[1, max_1] × … × [1, max_M]`.
fn config_at(mut index: u128, bounds: &[u32]) -> RedundancyVector {
    let mut l = vec![0u32; bounds.len()];
    for m in (0..bounds.len()).rev() {
        let radix = bounds[m] as u128;
        l[m] = (index % radix) as u32 + 1;
        index /= radix;
    }
    RedundancyVector(l)
}

/// Searches every configuration with `1 ≤ l_m ≤ max_redundancy_m`.
pub fn optimize(spec: &ChainSpec, target: f64) -> Result<Outcome> {
    check_target(target)?;
    let evaluator = ChainEvaluator::new(spec)?;
    optimize_with(&evaluator, target)
}

pub fn optimize_with(evaluator: &ChainEvaluator, target: f64) -> Result<Outcome> {
    check_target(target)?;
    let spec = evaluator.spec();
    let bounds: Vec<u32> = spec.subsystems.iter().map(|s| s.max_redundancy).collect();
    let size = bounds.iter().map(|&b| b as u128).product::<u128>();
    if size > SEARCH_GUARD {
        return Err(Error::SearchSpaceTooLarge { size, guard: SEARCH_GUARD });
    }

    let evaluations: Vec<Evaluation> = (0..size)
        .into_par_iter()
        .map(|index| {
            let l = config_at(index, &bounds);
            let availability = evaluator.availability(&l)?;
            Ok(Evaluation { cost: spec.cost(&l), feasible: availability >= target, l, availability })
        })
        .collect::<Result<_>>()?;

    let feasible: Vec<&Evaluation> = evaluations.iter().filter(|e| e.feasible).collect();
    let Some(min_cost) = feasible.iter().map(|e| e.cost).reduce(f64::min) else {
        let best = evaluations
            .iter()
            .reduce(|a, b| if b.availability > a.availability { b } else { a })
            .expect("search box is never empty");
        return Ok(Outcome::Infeasible(Infeasible {
            target,
            best: best.l.clone(),
            best_availability: best.availability,
            evaluated_count: evaluations.len(),
            evaluations,
        }));
    };
    let (optima, availabilities) = feasible
        .iter()
        .filter(|e| costs_equal(e.cost, min_cost))
        .map(|e| (e.l.clone(), e.availability))
        .unzip();
    Ok(Outcome::Optimal(OptimizationResult {
        target,
        optima,
        min_cost,
        availabilities,
        evaluated_count: evaluations.len(),
        feasible_count: feasible.len(),
        evaluations,
    }))
}

/// One row of a demand sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandRow {
    pub demand: PerfVector,
    /// Instance counts used for this row (first subsystem's node).
    pub instances: Vec<u32>,
    pub outcome: Outcome,
}

/// Re-optimizes the chain for each demand vector.
///
/// With `recompute_instances`, every node's instance counts are reset to
/// `n_i = ⌈w_i / γ⌉` (at least one); otherwise they are held fixed.
pub fn demand_sweep(
    spec: &ChainSpec,
    demands: &[PerfVector],
    target: f64,
    recompute_instances: bool,
) -> Result<Vec<DemandRow>> {
    check_target(target)?;
    let shared = if recompute_instances { None } else { Some(ChainEvaluator::new(spec)?) };
    demands
        .iter()
        .map(|w| {
            if w.dim() != spec.tenants() {
                return Err(Error::DimensionMismatch { expected: spec.tenants(), found: w.dim() });
            }
            let evaluator = match &shared {
                Some(e) => e.with_demand(w.clone()),
                None => {
                    let mut row_spec = spec.map_nodes(|node| {
                        let mut node = node.clone();
                        node.instances = w
                            .levels()
                            .iter()
                            .map(|&wi| wi.div_ceil(node.capacity).max(1) as u32)
                            .collect();
                        node
                    });
                    row_spec.demand = w.clone();
                    ChainEvaluator::new(&row_spec)?
                }
            };
            let instances = evaluator.spec().subsystems[0].node.instances.clone();
            Ok(DemandRow { demand: w.clone(), instances, outcome: optimize_with(&evaluator, target)? })
        })
        .collect()
}
