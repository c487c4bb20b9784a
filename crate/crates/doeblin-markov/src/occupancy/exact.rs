//! Exact occupancy law via dynamic programming over (state, count) pairs.
//!
//! The moment generating function of the count is the bilinear form
//! `mu * p(z)^n * 1` of the transfer kernel `p(z)(i, j) = p(i, j) z^[j in T]`;
//! the DP below advances the same object one transition at a time without any
//! polynomial arithmetic, in `O(n^2 |S|^2)` time and `O(n |S|)` space.

use crate::error::{Error, Result};
use crate::occupancy::{CountDistribution, CountStateTable};
use crate::stochastic::{ProbVector, StochasticMatrix, TargetSet};

fn check_dims(mu: &ProbVector, p: &StochasticMatrix, target: &TargetSet) -> Result<()> {
    if p.dim() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.len(),
            found: p.dim(),
        });
    }
    if target.dim() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.len(),
            found: target.dim(),
        });
    }
    Ok(())
}

/// The exact law of the number of transitions among the first `n` whose
/// destination lies in `target`. The initial state is never counted: the
/// count sums Iverson brackets over steps `1..=n`.
pub fn exact_occupancy(
    mu: &ProbVector,
    p: &StochasticMatrix,
    target: &TargetSet,
    n: usize,
) -> Result<CountDistribution> {
    check_dims(mu, p, target)?;
    let mut table = CountStateTable::unmarked(mu);
    for _ in 0..n {
        table.step(p, target);
    }
    Ok(table.count_law())
}

/// Mean and variance of the occupancy count. The mean is accumulated from
/// the state-distribution trajectory, `sum_t (mu p^t)(T)`; the variance is
/// read off the exact law, which stays the single source of truth.
pub fn occupancy_moments(
    mu: &ProbVector,
    p: &StochasticMatrix,
    target: &TargetSet,
    n: usize,
) -> Result<(f64, f64)> {
    check_dims(mu, p, target)?;
    let mut mean = 0.0;
    let mut dist = mu.clone();
    for _ in 0..n {
        dist = dist.propagate(p)?;
        mean += dist.mass_on(target);
    }
    let law = exact_occupancy(mu, p, target, n)?;
    Ok((mean, law.variance()))
}
