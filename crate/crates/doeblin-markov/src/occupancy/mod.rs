//! Occupancy distributions: the law of the number of steps, out of the first
//! `n` transitions, that land in a target set. Exact transfer-kernel dynamic
//! programming lives in [`exact`]; the memory-breaker approximation and the
//! Normal / Pólya-Aeppli baselines live in [`approx`].

pub mod approx;
pub mod exact;

use crate::error::{Error, Result};
use crate::stochastic::{tv_slices, ProbVector, StochasticMatrix, TargetSet};

/// A distribution of an integer count on `{0, ..., horizon}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    weights: Vec<f64>,
}

impl CountDistribution {
    /// Validates non-negativity and normalization within 1e-9, then
    /// renormalizes exactly.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::WeightSumOffOne { sum: 0.0 });
        }
        let mut weights = weights;
        for (i, w) in weights.iter_mut().enumerate() {
            if *w < -1e-12 {
                return Err(Error::NegativeWeight {
                    index: i,
                    value: *w,
                });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::WeightSumOffOne { sum });
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_normalized(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    /// All mass on `at`.
    pub fn point_mass(horizon: usize, at: usize) -> Self {
        assert!(at <= horizon, "point mass beyond the horizon");
        let mut weights = vec![0.0; horizon + 1];
        weights[at] = 1.0;
        Self { weights }
    }

    /// Largest representable count.
    pub fn horizon(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn get(&self, count: usize) -> f64 {
        self.weights.get(count).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, &w)| k as f64 * w)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| (k as f64).powi(2) * w)
            .sum();
        (second - mean * mean).max(0.0)
    }

    /// Total variation distance, treating both laws as supported on the
    /// non-negative integers (missing cells count as zero).
    pub fn total_variation(&self, other: &Self) -> f64 {
        tv_slices(&self.weights, &other.weights)
    }
}

/// Joint table `P[count = c, state = s]` used by the marking dynamic
/// programs. Stored count-major; one step multiplies by a kernel and bumps
/// the count when the destination lies in the target set.
#[derive(Debug, Clone)]
pub(crate) struct CountStateTable {
    dim: usize,
    /// `weights[c * dim + s]`
    weights: Vec<f64>,
}

impl CountStateTable {
    /// Start of the chain: state drawn from `mu`, nothing counted yet.
    pub fn unmarked(mu: &ProbVector) -> Self {
        Self {
            dim: mu.len(),
            weights: mu.as_slice().to_vec(),
        }
    }

    /// Start of an inner piece: state drawn from `e`, counted immediately
    /// when it lies in the target set.
    pub fn marked(e: &ProbVector, target: &TargetSet) -> Self {
        let dim = e.len();
        let mut weights = vec![0.0; 2 * dim];
        for s in 0..dim {
            let slot = if target.contains(s) { dim + s } else { s };
            weights[slot] = e.get(s);
        }
        Self { dim, weights }
    }

    pub fn counts(&self) -> usize {
        self.weights.len() / self.dim
    }

    /// Advances one transition of `kernel`, incrementing the count on
    /// arrival in `target`.
    pub fn step(&mut self, kernel: &StochasticMatrix, target: &TargetSet) {
        debug_assert_eq!(kernel.dim(), self.dim);
        let dim = self.dim;
        let counts = self.counts();
        let mut next = vec![0.0; (counts + 1) * dim];
        for c in 0..counts {
            let layer = &self.weights[c * dim..(c + 1) * dim];
            for (s, &w) in layer.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let row = kernel.row(s);
                for (j, &t) in row.iter().enumerate() {
                    if t == 0.0 {
                        continue;
                    }
                    let target_count = if target.contains(j) { c + 1 } else { c };
                    next[target_count * dim + j] += w * t;
                }
            }
        }
        self.weights = next;
    }

    /// Marginal law of the count.
    pub fn count_law(&self) -> CountDistribution {
        let dim = self.dim;
        let marginal: Vec<f64> = self
            .weights
            .chunks_exact(dim)
            .map(|layer| layer.iter().sum())
            .collect();
        let sum: f64 = marginal.iter().sum();
        CountDistribution::from_normalized(marginal.into_iter().map(|w| w / sum).collect())
    }
}
