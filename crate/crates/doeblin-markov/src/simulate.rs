//! Seeded Monte Carlo validation of the coin-toss construction.
//!
//! The construction replaces each transition of the chain by a coin toss:
//! heads (probability `alpha`) draws the next state from the memory-breaker
//! distribution, tails moves by the residual kernel. Sampling both this
//! process and the chain itself, then comparing transition-pair frequencies
//! and occupancy counts, gives a statistical check that the two have the
//! same law.
//!
//! All sampling uses an explicitly seeded ChaCha8 generator, so identical
//! configurations reproduce identical output on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::doeblin::DoeblinDecomposition;
use crate::error::{Error, Result};
use crate::occupancy::CountDistribution;
use crate::stochastic::{ProbVector, StochasticMatrix, TargetSet};

/// Reproducibility contract for a sampling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub samples: u64,
}

impl SimConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        Self { seed, samples }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Aggregates from sampling the coin-toss construction.
#[derive(Debug, Clone)]
pub struct CoinChainSample {
    /// Empirical law of the occupancy count.
    pub occupancy: CountDistribution,
    /// Transition-pair counts, row-major `from * dim + to`.
    pub transition_counts: Vec<u64>,
    /// `longest_run_counts[r]`: paths whose longest residual run equals `r`.
    pub longest_run_counts: Vec<u64>,
    /// Total number of memory-breaker tosses across all paths.
    pub breaker_tosses: u64,
    pub samples: u64,
}

impl CoinChainSample {
    /// Empirical `P[L_n <= m]`.
    pub fn run_cap_fraction(&self, m: usize) -> f64 {
        let hits: u64 = self.longest_run_counts.iter().take(m + 1).sum();
        hits as f64 / self.samples as f64
    }
}

/// Aggregates from sampling the chain directly.
#[derive(Debug, Clone)]
pub struct DirectChainSample {
    pub occupancy: CountDistribution,
    pub transition_counts: Vec<u64>,
    pub samples: u64,
}

fn draw(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Samples `cfg.samples` trajectories of the coin-toss process over `n`
/// transitions, recording occupancy counts, transition pairs, breaker
/// tosses, and the realized longest residual run of each path.
pub fn sample_coin_chain(
    mu: &ProbVector,
    dec: &DoeblinDecomposition,
    target: &TargetSet,
    n: usize,
    cfg: SimConfig,
) -> Result<CoinChainSample> {
    let dim = dec.residual().dim();
    if mu.len() != dim || target.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: mu.len(),
        });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let alpha = dec.alpha();
    let e = dec.e().as_slice();
    let residual = dec.residual();
    let mut rng = cfg.rng();
    let mut occupancy = vec![0u64; n + 1];
    let mut transition_counts = vec![0u64; dim * dim];
    let mut longest_run_counts = vec![0u64; n + 1];
    let mut breaker_tosses = 0u64;
    for _ in 0..cfg.samples {
        let mut state = draw(&mut rng, mu.as_slice());
        let mut count = 0usize;
        let mut run = 0usize;
        let mut longest = 0usize;
        for _ in 0..n {
            let from = state;
            if rng.random::<f64>() < alpha {
                state = draw(&mut rng, e);
                breaker_tosses += 1;
                run = 0;
            } else {
                state = draw(&mut rng, residual.row(from));
                run += 1;
                longest = longest.max(run);
            }
            transition_counts[from * dim + state] += 1;
            count += usize::from(target.contains(state));
        }
        occupancy[count] += 1;
        longest_run_counts[longest] += 1;
    }
    let occupancy = CountDistribution::from_normalized(
        occupancy
            .into_iter()
            .map(|c| c as f64 / cfg.samples as f64)
            .collect(),
    );
    Ok(CoinChainSample {
        occupancy,
        transition_counts,
        longest_run_counts,
        breaker_tosses,
        samples: cfg.samples,
    })
}

/// Samples trajectories of the chain itself: the control arm.
pub fn sample_direct_chain(
    mu: &ProbVector,
    p: &StochasticMatrix,
    target: &TargetSet,
    n: usize,
    cfg: SimConfig,
) -> Result<DirectChainSample> {
    let dim = p.dim();
    if mu.len() != dim || target.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: mu.len(),
        });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let mut rng = cfg.rng();
    let mut occupancy = vec![0u64; n + 1];
    let mut transition_counts = vec![0u64; dim * dim];
    for _ in 0..cfg.samples {
        let mut state = draw(&mut rng, mu.as_slice());
        let mut count = 0usize;
        for _ in 0..n {
            let from = state;
            state = draw(&mut rng, p.row(from));
            transition_counts[from * dim + state] += 1;
            count += usize::from(target.contains(state));
        }
        occupancy[count] += 1;
    }
    let occupancy = CountDistribution::from_normalized(
        occupancy
            .into_iter()
            .map(|c| c as f64 / cfg.samples as f64)
            .collect(),
    );
    Ok(DirectChainSample {
        occupancy,
        transition_counts,
        samples: cfg.samples,
    })
}

/// Two-sample chi-square statistic over matched count cells (cells empty in
/// both samples are dropped). Returns `(statistic, degrees_of_freedom)`.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> (f64, u64) {
    assert_eq!(a.len(), b.len(), "cell layouts must match");
    let total_a: u64 = a.iter().sum();
    let total_b: u64 = b.iter().sum();
    let ratio_ab = (total_b as f64 / total_a as f64).sqrt();
    let mut statistic = 0.0;
    let mut cells = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        cells += 1;
        let diff = x as f64 * ratio_ab - y as f64 / ratio_ab;
        statistic += diff * diff / (x + y) as f64;
    }
    (statistic, cells.saturating_sub(1))
}

/// Upper tail probability of the chi-square distribution.
pub fn chi_square_survival(statistic: f64, dof: u64) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}
