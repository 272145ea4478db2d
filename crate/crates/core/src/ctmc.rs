//! Finite-state continuous-time Markov chains.
//!
//! A [`GeneratorMatrix`] is the infinitesimal generator `Q` of a homogeneous
//! CTMC: off-diagonal entries are transition rates (per second) and every
//! row sums to zero. [`steady_state`] solves `pQ = 0, Σp = 1` for an
//! irreducible chain by a direct dense factorization.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Maximum absolute row-sum deviation accepted for a generator.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;
/// Maximum `‖pQ‖∞` accepted for a steady-state solution, measured on the
/// generator normalized by its largest rate.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Probabilities below this are flushed to zero after solving.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Infinitesimal generator of a finite CTMC, stored dense and row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n_states: usize,
    entries: Vec<f64>,
}

impl GeneratorMatrix {
    /// Builds a generator from a dense square matrix, checking the generator
    /// invariants. The diagonal must already hold the negative row sums.
    pub fn from_dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyChain);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGenerator(format!(
                    "row {j} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        let q = Self { n_states: n, entries };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_states;
        for j in 0..n {
            let mut sum = 0.0;
            for k in 0..n {
                let v = self.get(j, k);
                if !v.is_finite() {
                    return Err(Error::InvalidGenerator(format!("entry ({j},{k}) is not finite")));
                }
                if j != k && v < 0.0 {
                    return Err(Error::InvalidGenerator(format!(
                        "off-diagonal entry ({j},{k}) = {v} is negative"
                    )));
                }
                sum += v;
            }
            if sum.abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidGenerator(format!("row {j} sums to {sum:e}")));
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.n_states + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from * self.n_states..(from + 1) * self.n_states]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_states).map(|j| self.get(j, j)).collect()
    }

    /// Number of states reachable in one transition from `from`.
    pub fn out_degree(&self, from: usize) -> usize {
        self.row(from)
            .iter()
            .enumerate()
            .filter(|&(k, &v)| k != from && v > 0.0)
            .count()
    }

    /// Positive off-diagonal rates leaving `from`, as `(to, rate)` pairs.
    pub fn transitions_from(&self, from: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(from)
            .iter()
            .copied()
            .enumerate()
            .filter(move |&(k, v)| k != from && v > 0.0)
    }

    pub fn max_rate(&self) -> f64 {
        (0..self.n_states).map(|j| -self.get(j, j)).fold(0.0, f64::max)
    }

    /// Returns the dense rows (for inspection and tests).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_states).map(|j| self.row(j).to_vec()).collect()
    }

    /// First state that is not mutually reachable with state 0, if any.
    fn first_unconnected_state(&self) -> Option<usize> {
        let n = self.n_states;
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(j) = queue.pop_front() {
                for (k, seen_k) in seen.iter_mut().enumerate() {
                    let rate = if forward { self.get(j, k) } else { self.get(k, j) };
                    if k != j && rate > 0.0 && !*seen_k {
                        *seen_k = true;
                        queue.push_back(k);
                    }
                }
            }
            seen
        };
        let fwd = reach(true);
        let bwd = reach(false);
        (0..n).find(|&j| !(fwd[j] && bwd[j]))
    }

    /// Whether the directed graph of positive rates is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        self.first_unconnected_state().is_none()
    }

    /// `‖pQ‖∞` for a row vector `p`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let n = self.n_states;
        (0..n)
            .map(|k| (0..n).map(|j| p[j] * self.get(j, k)).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// Builds a generator from a list of `(from, to, rate)` transitions.
/// Duplicate pairs are summed and the diagonal is set to the negative row sum.
pub fn build_generator(
    n_states: usize,
    transitions: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<GeneratorMatrix> {
    if n_states == 0 {
        return Err(Error::EmptyChain);
    }
    let mut entries = vec![0.0; n_states * n_states];
    for (from, to, rate) in transitions {
        for index in [from, to] {
            if index >= n_states {
                return Err(Error::StateOutOfRange { index, n_states });
            }
        }
        if from == to {
            return Err(Error::SelfLoop(from));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::NonPositiveRate { from, to, rate });
        }
        entries[from * n_states + to] += rate;
    }
    for j in 0..n_states {
        let row = &mut entries[j * n_states..(j + 1) * n_states];
        let out: f64 = row.iter().sum();
        row[j] = -out;
    }
    Ok(GeneratorMatrix { n_states, entries })
}

/// A probability distribution over the states of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Solves the stationary distribution of an irreducible generator.
///
/// The rates are normalized by the largest exit rate, the transposed system
/// `Qᵀpᵀ = 0` has its last equation replaced by `Σp = 1`, and the result is
/// obtained by LU factorization with partial pivoting.
pub fn steady_state(q: &GeneratorMatrix) -> Result<ProbabilityVector> {
    let n = q.n_states();
    if n == 1 {
        return Ok(ProbabilityVector(vec![1.0]));
    }
    if let Some(unreachable) = q.first_unconnected_state() {
        return Err(Error::Reducible { unreachable });
    }
    let scale = q.max_rate();
    let mut a = DMatrix::<f64>::from_fn(n, n, |r, c| q.get(c, r) / scale);
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularSystem("LU factorization is singular".into()))?;

    let mut p: Vec<f64> = x.iter().map(|&v| if v < PROBABILITY_FLOOR { 0.0 } else { v }).collect();
    let total: f64 = p.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::SingularSystem(format!("solution mass {total}")));
    }
    p.iter_mut().for_each(|v| *v /= total);

    let residual = q.residual(&p) / scale;
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::SingularSystem(format!(
            "normalized residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    Ok(ProbabilityVector(p))
}
