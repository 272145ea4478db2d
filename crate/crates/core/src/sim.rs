//! Monte Carlo discrete-event simulation of a whole chain.
//!
//! Every node evolves as its own CTMC driven by exponential races; the
//! chain performance (minimum over subsystems of the sums over parallel
//! nodes) is recomputed only when some node jumps. The estimate is the
//! post-warmup fraction of time during which the demand is met, averaged
//! over independent replications.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, RedundancyVector};
use crate::error::{Error, Result};
use crate::mugf::PerfVector;
use crate::vnf::{NodeModel, VnfSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Simulated model time per replication, in seconds.
    pub horizon: f64,
    /// Initial model time discarded from the estimate.
    pub warmup: f64,
    pub seed: u64,
    pub replications: u32,
}

impl SimConfig {
    /// Config with the default warmup of 1% of the horizon.
    pub fn new(horizon: f64, seed: u64, replications: u32) -> Self {
        Self { horizon, warmup: 0.01 * horizon, seed, replications }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.warmup >= 0.0 && self.horizon > self.warmup) {
            return Err(Error::InvalidSimConfig(format!(
                "need horizon > warmup >= 0, got horizon {} and warmup {}",
                self.horizon, self.warmup
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSimConfig("at least one replication is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    #[serde(rename = "mean")]
    pub availability_mean: f64,
    pub std_error: f64,
    pub replications: u32,
    pub horizon: f64,
    pub seed: u64,
}

/// Jump structure of one node: per state, cumulative exit rates.
#[derive(Debug, Clone)]
struct NodeKernel {
    exits: Vec<Vec<(usize, f64)>>,
    total: Vec<f64>,
    performance: Vec<PerfVector>,
    start: usize,
}

impl NodeKernel {
    fn new(spec: &VnfSpec) -> Result<Self> {
        let model = NodeModel::solve(spec)?;
        let q = &model.generator;
        let mut exits = Vec::with_capacity(q.n_states());
        let mut total = Vec::with_capacity(q.n_states());
        for j in 0..q.n_states() {
            let mut acc = 0.0;
            let row: Vec<(usize, f64)> = q
                .transitions_from(j)
                .map(|(k, r)| {
                    acc += r;
                    (k, acc)
                })
                .collect();
            exits.push(row);
            total.push(acc);
        }
        Ok(Self { exits, total, performance: model.performance, start: model.space.full_index() })
    }

    fn holding_time(&self, state: usize, rng: &mut ChaCha8Rng) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / self.total[state]
    }

    fn next_state(&self, state: usize, rng: &mut ChaCha8Rng) -> usize {
        let u = rng.random::<f64>() * self.total[state];
        let row = &self.exits[state];
        row.iter().find(|&&(_, cum)| u < cum).unwrap_or(&row[row.len() - 1]).0
    }
}

fn node_rng(seed: u64, replication: u32, node: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((replication as u64) << 32) | node as u64);
    rng
}

struct Process<'a> {
    kernel: &'a NodeKernel,
    rng: ChaCha8Rng,
    state: usize,
    next_jump: f64,
}

impl<'a> Process<'a> {
    fn new(kernel: &'a NodeKernel, mut rng: ChaCha8Rng) -> Self {
        let state = kernel.start;
        let next_jump = kernel.holding_time(state, &mut rng);
        Self { kernel, rng, state, next_jump }
    }

    fn jump(&mut self) -> (usize, usize) {
        let old = self.state;
        self.state = self.kernel.next_state(old, &mut self.rng);
        self.next_jump += self.kernel.holding_time(self.state, &mut self.rng);
        (old, self.state)
    }
}

fn overlap(a: f64, b: f64, warmup: f64, horizon: f64) -> f64 {
    (b.min(horizon) - a.max(warmup)).max(0.0)
}

fn replicate(
    kernels: &[&NodeKernel],
    subsystem_of: &[usize],
    n_subsystems: usize,
    demand: &PerfVector,
    cfg: &SimConfig,
    replication: u32,
) -> f64 {
    let k = demand.dim();
    let mut procs: Vec<Process> = kernels
        .iter()
        .enumerate()
        .map(|(i, kern)| Process::new(kern, node_rng(cfg.seed, replication, i)))
        .collect();
    let mut sums = vec![vec![0u64; k]; n_subsystems];
    for (p, &m) in procs.iter().zip(subsystem_of) {
        for (s, g) in sums[m].iter_mut().zip(p.kernel.performance[p.state].levels()) {
            *s += g;
        }
    }
    let meets = |sums: &[Vec<u64>]| sums.iter().all(|s| s.iter().zip(demand.levels()).all(|(g, w)| g >= w));

    let mut up = meets(&sums);
    let mut now = 0.0;
    let mut up_time = 0.0;
    loop {
        let (i, t) = procs
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.next_jump))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("chain has nodes");
        if t >= cfg.horizon {
            break;
        }
        if up {
            up_time += overlap(now, t, cfg.warmup, cfg.horizon);
        }
        now = t;
        let (old, new) = procs[i].jump();
        let perf = &procs[i].kernel.performance;
        let m = subsystem_of[i];
        for ((s, a), b) in sums[m].iter_mut().zip(perf[old].levels()).zip(perf[new].levels()) {
            *s = *s - a + b;
        }
        up = meets(&sums);
    }
    if up {
        up_time += overlap(now, cfg.horizon, cfg.warmup, cfg.horizon);
    }
    up_time / (cfg.horizon - cfg.warmup)
}

/// Estimates the steady-state availability of configuration `l`.
pub fn simulate_chain(spec: &ChainSpec, l: &RedundancyVector, cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    spec.validate()?;
    spec.check_redundancy(l)?;

    let mut distinct: Vec<(&VnfSpec, NodeKernel)> = Vec::new();
    let mut layout: Vec<(usize, usize)> = Vec::new(); // (kernel index, subsystem)
    for (m, (sub, &lm)) in spec.subsystems.iter().zip(l.as_slice()).enumerate() {
        for position in 0..lm as usize {
            let node = sub.node_at(position);
            let idx = match distinct.iter().position(|(s, _)| *s == node) {
                Some(i) => i,
                None => {
                    distinct.push((node, NodeKernel::new(node)?));
                    distinct.len() - 1
                }
            };
            layout.push((idx, m));
        }
    }
    let kernels: Vec<&NodeKernel> = layout.iter().map(|&(i, _)| &distinct[i].1).collect();
    let subsystem_of: Vec<usize> = layout.iter().map(|&(_, m)| m).collect();

    let fractions: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| replicate(&kernels, &subsystem_of, spec.subsystems.len(), &spec.demand, cfg, r))
        .collect();
    Ok(summarize(&fractions, cfg))
}

fn summarize(fractions: &[f64], cfg: &SimConfig) -> SimEstimate {
    let n = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / n;
    let std_error = if fractions.len() > 1 {
        let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    SimEstimate {
        availability_mean: mean.clamp(0.0, 1.0),
        std_error,
        replications: cfg.replications,
        horizon: cfg.horizon,
        seed: cfg.seed,
    }
}

/// Post-warmup fraction of time spent in each node state, for one
/// replication of a single node.
pub fn simulate_node_occupancy(spec: &VnfSpec, cfg: &SimConfig, replication: u32) -> Result<Vec<f64>> {
    cfg.validate()?;
    let kernel = NodeKernel::new(spec)?;
    let mut proc = Process::new(&kernel, node_rng(cfg.seed, replication, 0));
    let mut time_in = vec![0.0; kernel.total.len()];
    let mut now = 0.0;
    while proc.next_jump < cfg.horizon {
        time_in[proc.state] += overlap(now, proc.next_jump, cfg.warmup, cfg.horizon);
        now = proc.next_jump;
        proc.jump();
    }
    time_in[proc.state] += overlap(now, cfg.horizon, cfg.warmup, cfg.horizon);
    let span = cfg.horizon - cfg.warmup;
    Ok(time_in.into_iter().map(|t| t / span).collect())
}
