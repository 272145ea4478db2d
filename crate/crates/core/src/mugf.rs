//! Multidimensional universal generating functions.
//!
//! A [`PerfDistribution`] is the u-function `u(z) = Σ_j p_j Π_i z_i^{g_ij}`
//! of a discrete random performance vector. The indeterminates are never
//! materialized: the exponent vectors are the map keys and the coefficients
//! are the probabilities.
//!
//! Two composition operators are provided. [`parallel_compose`] models
//! parallel elements with flow dispersion (performance vectors add) and
//! [`series_compose`] models series elements (element-wise minimum, the
//! bottleneck). With `K = 1` both reduce to the scalar UGF operators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ctmc::PROBABILITY_FLOOR;

/// Integer performance (sessions) offered to each tenant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PerfVector(Vec<u64>);

impl PerfVector {
    pub fn new(levels: Vec<u64>) -> Self {
        Self(levels)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn levels(&self) -> &[u64] {
        &self.0
    }

    /// Whether every coordinate meets the corresponding demand.
    pub fn meets(&self, demand: &PerfVector) -> bool {
        self.0.iter().zip(&demand.0).all(|(g, w)| g >= w)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn saturating_add(&self, other: &Self) -> Self {
        self.zip_with(other, u64::saturating_add)
    }

    pub fn min(&self, other: &Self) -> Self {
        self.zip_with(other, u64::min)
    }
}

impl From<Vec<u64>> for PerfVector {
    fn from(levels: Vec<u64>) -> Self {
        Self(levels)
    }
}

impl fmt::Display for PerfVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// Sparse distribution over `K`-dimensional performance vectors.
///
/// Terms are kept sorted by performance vector; equal vectors are always
/// merged and terms of probability below `1e-300` are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfDistribution {
    dimension: usize,
    terms: BTreeMap<PerfVector, f64>,
}

impl PerfDistribution {
    /// The distribution concentrated on one vector.
    pub fn degenerate(g: PerfVector) -> Self {
        let dimension = g.dim();
        Self { dimension, terms: BTreeMap::from([(g, 1.0)]) }
    }

    /// Collects `(g, p)` pairs, summing the probabilities of equal vectors.
    pub fn merge_terms(
        dimension: usize,
        terms: impl IntoIterator<Item = (PerfVector, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (g, p) in terms {
            if g.dim() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, found: g.dim() });
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidProbability(p));
            }
            *map.entry(g).or_insert(0.0) += p;
        }
        Ok(Self::from_map(dimension, map))
    }

    fn from_map(dimension: usize, mut terms: BTreeMap<PerfVector, f64>) -> Self {
        terms.retain(|_, p| *p >= PROBABILITY_FLOOR);
        Self { dimension, terms }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of distinct performance vectors.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of performance vector.
    pub fn iter(&self) -> impl Iterator<Item = (&PerfVector, f64)> {
        self.terms.iter().map(|(g, &p)| (g, p))
    }

    pub fn probability(&self, g: &PerfVector) -> f64 {
        self.terms.get(g).copied().unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.terms.values().sum()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dimension != other {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: other });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&PerfVector, &PerfVector) -> PerfVector) -> Result<Self> {
        self.check_dim(other.dimension)?;
        let mut out = BTreeMap::new();
        for (ga, &pa) in &self.terms {
            for (gb, &pb) in &other.terms {
                *out.entry(f(ga, gb)).or_insert(0.0) += pa * pb;
            }
        }
        Ok(Self::from_map(self.dimension, out))
    }

    /// Binary parallel operator: distribution of the sum of independent draws.
    pub fn parallel(&self, other: &Self) -> Result<Self> {
        self.combine(other, PerfVector::saturating_add)
    }

    /// Binary series operator: distribution of the element-wise minimum.
    pub fn series(&self, other: &Self) -> Result<Self> {
        self.combine(other, PerfVector::min)
    }

    /// Steady-state availability: total probability of vectors meeting `demand`
    /// in every coordinate.
    pub fn availability(&self, demand: &PerfVector) -> Result<f64> {
        self.check_dim(demand.dim())?;
        let a: f64 = self.terms.iter().filter(|(g, _)| g.meets(demand)).map(|(_, p)| p).sum();
        Ok(a.clamp(0.0, 1.0))
    }

    /// Terms meeting `demand`, in lexicographic order.
    pub fn acceptable_terms<'a>(
        &'a self,
        demand: &'a PerfVector,
    ) -> impl Iterator<Item = (&'a PerfVector, f64)> + 'a {
        self.iter().filter(move |(g, _)| g.meets(demand))
    }
}

fn fold_compose(
    dists: &[PerfDistribution],
    op: impl Fn(&PerfDistribution, &PerfDistribution) -> Result<PerfDistribution>,
) -> Result<PerfDistribution> {
    let (first, rest) = dists.split_first().ok_or(Error::EmptyComposition)?;
    rest.iter().try_fold(first.clone(), |acc, d| op(&acc, d))
}

/// Parallel composition with flow dispersion, folded left to right.
pub fn parallel_compose(dists: &[PerfDistribution]) -> Result<PerfDistribution> {
    fold_compose(dists, PerfDistribution::parallel)
}

/// Series composition, folded left to right.
pub fn series_compose(dists: &[PerfDistribution]) -> Result<PerfDistribution> {
    fold_compose(dists, PerfDistribution::series)
}

pub fn availability(dist: &PerfDistribution, demand: &PerfVector) -> Result<f64> {
    dist.availability(demand)
}

/// Builds a distribution from raw pairs, taking the dimension from the first.
pub fn merge_terms(terms: Vec<(PerfVector, f64)>) -> Result<PerfDistribution> {
    let dimension = terms.first().map_or(0, |(g, _)| g.dim());
    PerfDistribution::merge_terms(dimension, terms)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    g: PerfVector,
    p: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRepr {
    dimension: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for PerfDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionRepr {
            dimension: self.dimension,
            terms: self.iter().map(|(g, p)| TermRepr { g: g.clone(), p }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PerfDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DistributionRepr::deserialize(deserializer)?;
        PerfDistribution::merge_terms(repr.dimension, repr.terms.into_iter().map(|t| (t.g, t.p)))
            .map_err(serde::de::Error::custom)
    }
}
