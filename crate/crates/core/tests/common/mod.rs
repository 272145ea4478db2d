#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfcavail::config::ConfigFile;
use sfcavail::vnf::{build_vnf_generator, performance_map};
use sfcavail::{evaluate_chain, ChainSpec, PerfDistribution, PerfVector, RateSet, RedundancyVector, Subsystem, VnfSpec};

pub const VIMS_JSON: &str = include_str!("../../examples/vims.json");

pub fn vims_config() -> ConfigFile {
    ConfigFile::from_json_str(VIMS_JSON).expect("bundled config parses")
}

pub fn vims() -> ChainSpec {
    vims_config().chain_spec()
}

pub fn vims_node() -> VnfSpec {
    vims().subsystems[0].node.clone()
}

pub fn rel_err(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs()
}

pub fn pv(levels: &[u64]) -> PerfVector {
    PerfVector::new(levels.to_vec())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random distribution with at most `max_terms` terms on a lattice of
/// step 10 in `[0, 50]^dim`.
pub fn random_distribution(rng: &mut ChaCha8Rng, dim: usize, max_terms: usize) -> PerfDistribution {
    let n = rng.random_range(1..=max_terms);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let terms = weights.into_iter().map(|w| {
        let g = (0..dim).map(|_| 10 * rng.random_range(0..=5u64)).collect();
        (PerfVector::new(g), w / total)
    });
    PerfDistribution::merge_terms(dim, terms).unwrap()
}

pub fn random_demand(rng: &mut ChaCha8Rng, dim: usize) -> PerfVector {
    PerfVector::new((0..dim).map(|_| 10 * rng.random_range(0..=6u64)).collect())
}

/// Small node with random rates spanning a few orders of magnitude.
pub fn random_node(rng: &mut ChaCha8Rng, instances: Vec<u32>) -> VnfSpec {
    let k = instances.len();
    let mut r = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let rates = RateSet {
        lambda_s: (0..k).map(|_| r(-3.0, -1.0)).collect(),
        mu_s: (0..k).map(|_| r(-1.5, 0.0)).collect(),
        lambda_v: r(-4.0, -2.0),
        mu_v: r(-2.0, -0.5),
        lambda_h: r(-5.0, -3.0),
        mu_h: r(-3.0, -1.0),
    };
    VnfSpec::new(instances, 10, rates).unwrap()
}

/// Exhaustive joint enumeration of a series-of-parallel structure: every
/// combination of one term per node, performance = min over subsystems of
/// the per-subsystem sums.
pub fn enumerate_chain(subsystems: &[Vec<PerfDistribution>], dim: usize) -> Vec<(Vec<u64>, f64)> {
    type Terms = Vec<(Vec<u64>, f64)>;
    let nodes: Vec<(usize, Terms)> = subsystems
        .iter()
        .enumerate()
        .flat_map(|(m, nodes)| {
            nodes.iter().map(move |d| (m, d.iter().map(|(g, p)| (g.levels().to_vec(), p)).collect()))
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; nodes.len()];
    loop {
        let mut sums = vec![vec![0u64; dim]; subsystems.len()];
        let mut p = 1.0;
        for (i, &c) in choice.iter().enumerate() {
            let (m, terms) = &nodes[i];
            let (g, pi) = &terms[c];
            for (s, x) in sums[*m].iter_mut().zip(g) {
                *s += x;
            }
            p *= pi;
        }
        let perf = (0..dim).map(|k| sums.iter().map(|s| s[k]).min().unwrap()).collect();
        out.push((perf, p));

        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < nodes[i].1.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Probability of each distinct vector in an enumeration.
pub fn collapse(terms: Vec<(Vec<u64>, f64)>) -> std::collections::BTreeMap<Vec<u64>, f64> {
    let mut map = std::collections::BTreeMap::new();
    for (g, p) in terms {
        *map.entry(g).or_insert(0.0) += p;
    }
    map
}

pub fn max_abs_diff(a: &PerfDistribution, b: &PerfDistribution) -> f64 {
    let keys: std::collections::BTreeSet<&PerfVector> = a.iter().map(|(g, _)| g).chain(b.iter().map(|(g, _)| g)).collect();
    keys.into_iter().map(|g| (a.probability(g) - b.probability(g)).abs()).fold(0.0, f64::max)
}

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn check_commutative(a: &PerfDistribution, b: &PerfDistribution) -> Check {
    let p = max_abs_diff(&a.parallel(b).unwrap(), &b.parallel(a).unwrap());
    let s = max_abs_diff(&a.series(b).unwrap(), &b.series(a).unwrap());
    ensure(p < 1e-15 && s < 1e-15, || format!("commutativity: parallel {p:e}, series {s:e}"))
}

pub fn check_associative(a: &PerfDistribution, b: &PerfDistribution, c: &PerfDistribution) -> Check {
    let p = max_abs_diff(&a.parallel(b).unwrap().parallel(c).unwrap(), &a.parallel(&b.parallel(c).unwrap()).unwrap());
    let s = max_abs_diff(&a.series(b).unwrap().series(c).unwrap(), &a.series(&b.series(c).unwrap()).unwrap());
    ensure(p < 1e-14 && s < 1e-14, || format!("associativity: parallel {p:e}, series {s:e}"))
}

pub fn check_conservation(a: &PerfDistribution, b: &PerfDistribution) -> Check {
    let tp = a.parallel(b).unwrap().total_probability();
    let ts = a.series(b).unwrap().total_probability();
    ensure((tp - 1.0).abs() < 1e-12 && (ts - 1.0).abs() < 1e-12, || format!("mass: parallel {tp}, series {ts}"))
}

/// Raising any demand coordinate never raises availability.
pub fn check_demand_monotone(a: &PerfDistribution, w: &PerfVector, coord: usize) -> Check {
    let mut higher = w.levels().to_vec();
    higher[coord] += 10;
    let (lo, hi) = (a.availability(w).unwrap(), a.availability(&PerfVector::new(higher)).unwrap());
    ensure(hi <= lo + 1e-15, || format!("demand monotonicity: {hi} > {lo}"))
}

/// Series availability never exceeds that of its weakest stage, and a
/// parallel pair is at least as available as either member.
pub fn check_bounds(a: &PerfDistribution, b: &PerfDistribution, w: &PerfVector) -> Check {
    let (aa, ab) = (a.availability(w).unwrap(), b.availability(w).unwrap());
    let s = a.series(b).unwrap().availability(w).unwrap();
    let p = a.parallel(b).unwrap().availability(w).unwrap();
    ensure(s <= aa.min(ab) + 1e-14, || format!("bottleneck: {s} > min({aa}, {ab})"))?;
    ensure(p >= aa.max(ab) - 1e-14, || format!("superposition: {p} < max({aa}, {ab})"))
}

/// One more parallel node in any subsystem never lowers availability.
pub fn check_redundancy_monotone(rng: &mut ChaCha8Rng) -> Check {
    use sfcavail::ChainEvaluator;
    let k = rng.random_range(1..=2usize);
    let m = rng.random_range(1..=3usize);
    let subsystems = (0..m)
        .map(|i| {
            let n = (0..k).map(|_| rng.random_range(1..=2)).collect();
            Subsystem::homogeneous(format!("s{i}"), random_node(rng, n), 1.0, 3)
        })
        .collect();
    let demand = PerfVector::new((0..k).map(|_| 10 * rng.random_range(0..=4u64)).collect());
    let spec = ChainSpec { subsystems, demand };
    let ev = ChainEvaluator::new(&spec).unwrap();
    let l: Vec<u32> = (0..m).map(|_| rng.random_range(1..=2)).collect();
    let base = ev.availability(&RedundancyVector(l.clone())).unwrap();
    for i in 0..m {
        let mut more = l.clone();
        more[i] += 1;
        let a = ev.availability(&RedundancyVector(more.clone())).unwrap();
        ensure(a >= base - 1e-14, || format!("l monotonicity: A({more:?}) = {a} < A({l:?}) = {base}"))?;
    }
    Ok(())
}

/// Grassmann-Taksar-Heyman elimination: subtraction-free, so accurate for
/// stiff generators.
pub fn gth(q: &[Vec<f64>]) -> Vec<f64> {
    let n = q.len();
    let mut a: Vec<Vec<f64>> = q.to_vec();
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| a[k][j]).sum();
        for row in a.iter_mut().take(k) {
            row[k] /= s;
        }
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    a[i][j] += a[i][k] * a[k][j];
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for j in 1..n {
        pi[j] = (0..j).map(|i| pi[i] * a[i][j]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.iter().map(|p| p / total).collect()
}

/// Largest availability error of `evaluate_chain` on a random two-node
/// chain, against the 36-state joint CTMC built as a Kronecker sum and
/// solved by [`gth`], over a grid of demands.
pub fn joint_two_node_error(seed: u64, series: bool) -> f64 {
    let mut r = rng(seed);
    let a = random_node(&mut r, vec![1, 1]);
    let b = random_node(&mut r, vec![1, 1]);
    let (qa, qb) = (build_vnf_generator(&a).unwrap(), build_vnf_generator(&b).unwrap());
    let (na, nb) = (qa.n_states(), qb.n_states());
    let (da, db) = (qa.to_dense(), qb.to_dense());
    let n = na * nb;
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..na {
        for j in 0..nb {
            let s = i * nb + j;
            for k in 0..na {
                q[s][k * nb + j] += da[i][k];
            }
            for k in 0..nb {
                q[s][i * nb + k] += db[j][k];
            }
        }
    }
    let pi = gth(&q);
    let (ga, gb) = (performance_map(&a).unwrap(), performance_map(&b).unwrap());
    let mut worst: f64 = 0.0;

    for w1 in [0u64, 5, 10, 15, 20] {
        for w2 in [0u64, 5, 10, 20] {
            let demand = pv(&[w1, w2]);
            let mut expected = 0.0;
            for i in 0..na {
                for j in 0..nb {
                    let g = if series { sfcavail::PerfVector::min(&ga[i], &gb[j]) } else { ga[i].saturating_add(&gb[j]) };
                    if g.meets(&demand) {
                        expected += pi[i * nb + j];
                    }
                }
            }
            let (spec, l) = if series {
                let spec = ChainSpec {
                    subsystems: vec![Subsystem::homogeneous("a", a.clone(), 1.0, 1), Subsystem::homogeneous("b", b.clone(), 1.0, 1)],
                    demand,
                };
                (spec, RedundancyVector(vec![1, 1]))
            } else {
                let mut sub = Subsystem::homogeneous("ab", a.clone(), 1.0, 2);
                sub.per_node = vec![a.clone(), b.clone()];
                (ChainSpec { subsystems: vec![sub], demand }, RedundancyVector(vec![2]))
            };
            let got = evaluate_chain(&spec, &l).unwrap().availability;
            worst = worst.max((got - expected).abs());
        }
    }
    worst
}
