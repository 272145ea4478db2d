//! Independent oracles for the analytic pipeline.

mod common;

use nalgebra::DMatrix;
use rand::Rng;

use common::*;
use sfcavail::ctmc::steady_state;
use sfcavail::sim::{simulate_node_occupancy, SimConfig};
use sfcavail::vnf::{build_vnf_generator, NodeModel};
use sfcavail::{parallel_compose, series_compose, PerfDistribution};

/// `exp(Q t)` by scaling and squaring of a Taylor polynomial.
fn expm(q: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let norm = q.abs().row_sum().max() * t;
    let s = (norm / 0.25).log2().ceil().max(0.0) as i32;
    let a = q * (t / 2f64.powi(s));
    let n = q.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn node_steady_state_matches_gth() {
    let q = build_vnf_generator(&vims_node()).unwrap();
    let pi = steady_state(&q).unwrap();
    let oracle = gth(&q.to_dense());
    for (i, (a, b)) in pi.as_slice().iter().zip(&oracle).enumerate() {
        assert!((a - b).abs() <= 1e-9 * b + 1e-15, "state {i}: {a} vs {b}");
    }
}

#[test]
fn small_node_steady_state_is_transient_limit() {
    // K = 1, n = 2: three working states plus VLF and HLF.
    let mut r = rng(5);
    let node = random_node(&mut r, vec![2]);
    let q = build_vnf_generator(&node).unwrap();
    assert_eq!(q.n_states(), 5);
    let pi = steady_state(&q).unwrap();
    let d = q.to_dense();
    let m = DMatrix::from_fn(5, 5, |i, j| d[i][j]);
    let p = expm(&m, 2e5);
    for row in 0..5 {
        for j in 0..5 {
            assert!((p[(row, j)] - pi[j]).abs() < 1e-9, "P[{row},{j}] = {} vs {}", p[(row, j)], pi[j]);
        }
    }
}

#[test]
fn vims_node_transient_limit() {
    let q = build_vnf_generator(&vims_node()).unwrap();
    let pi = steady_state(&q).unwrap();
    let d = q.to_dense();
    let n = d.len();
    let m = DMatrix::from_fn(n, n, |i, j| d[i][j]);
    let p = expm(&m, 1e9);
    for j in 0..n {
        assert!((p[(n - 1, j)] - pi[j]).abs() < 1e-9 * pi[j].max(1e-3), "state {j}");
    }
}

#[test]
fn random_nodes_match_gth() {
    let mut r = rng(11);
    for _ in 0..50 {
        let k = r.random_range(1..=3usize);
        let n: Vec<u32> = (0..k).map(|_| r.random_range(1..=3)).collect();
        let node = random_node(&mut r, n);
        let q = build_vnf_generator(&node).unwrap();
        let pi = steady_state(&q).unwrap();
        let oracle = gth(&q.to_dense());
        for (a, b) in pi.as_slice().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12 + 1e-9 * b, "{a} vs {b}");
        }
    }
}


#[test]
fn composition_matches_enumeration() {
    let mut r = rng(23);
    for _ in 0..100 {
        let dim = r.random_range(1..=2usize);
        let m = r.random_range(1..=3usize);
        let subsystems: Vec<Vec<PerfDistribution>> = (0..m)
            .map(|_| (0..r.random_range(1..=2usize)).map(|_| random_distribution(&mut r, dim, 10)).collect())
            .collect();
        let parallels: Vec<PerfDistribution> = subsystems.iter().map(|s| parallel_compose(s).unwrap()).collect();
        let chain = series_compose(&parallels).unwrap();
        let oracle = collapse(enumerate_chain(&subsystems, dim));
        assert_eq!(chain.len(), oracle.len());
        for (g, p) in chain.iter() {
            let q = oracle[g.levels()];
            assert!((p - q).abs() < 1e-14, "{g}: {p} vs {q}");
        }
    }
}

#[test]
fn series_pair_matches_kronecker_sum() {
    let err = joint_two_node_error(3, true);
    assert!(err < 1e-12, "{err:e}");
}

#[test]
fn parallel_pair_matches_kronecker_sum() {
    let err = joint_two_node_error(3, false);
    assert!(err < 1e-12, "{err:e}");
}

#[test]
fn simulated_occupancy_passes_chi_square() {
    let node = vims_node();
    let model = NodeModel::solve(&node).unwrap();
    let pi = model.probabilities.as_slice();
    let cfg = SimConfig::new(1e9, 17, 1);
    let reps: Vec<Vec<f64>> = (0..20).map(|r| simulate_node_occupancy(&node, &cfg, r).unwrap()).collect();
    let n = reps.len() as f64;
    let mut statistic = 0.0;
    let mut df = 0;
    for (s, &p) in pi.iter().enumerate() {
        if p < 1e-4 {
            continue;
        }
        let mean = reps.iter().map(|r| r[s]).sum::<f64>() / n;
        let var = reps.iter().map(|r| (r[s] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let z = (mean - p) / (var / n).sqrt();
        statistic += z * z;
        df += 1;
    }
    assert_eq!(df, 5, "frequently occupied states");
    // 0.999 quantile of chi-square with 5 degrees of freedom.
    assert!(statistic < 20.52, "chi-square {statistic} over {df} states");
}
