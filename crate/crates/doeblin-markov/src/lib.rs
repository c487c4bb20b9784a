//! Occupancy distributions of finite homogeneous Markov chains via Doeblin's
//! ergodicity coefficient.
//!
//! The coefficient `alpha(p) = sum_j min_i p(i, j)` measures how close a
//! transition kernel is to an i.i.d. model. Any kernel splits as
//!
//! ```text
//! p = alpha * E + (1 - alpha) * M
//! ```
//!
//! with `E` a rank-one stochastic matrix (every row equals a distribution
//! `e`) and `M` stochastic with a zero in each column. Running the chain is
//! then equivalent to tossing a coin each step: with probability `alpha` the
//! next state is drawn from `e` — a *memory-breaker* that erases the past —
//! and otherwise the step follows `M`. Memory-breaker times cut a trajectory
//! into independent pieces, which yields:
//!
//! - mixtures approximating the state distribution `mu * p^n` with an
//!   explicit total-variation bound `(1 - alpha)^(m + 1)` ([`doeblin`]),
//! - an approximation of the occupancy law of a target set (how many of the
//!   first `n` steps land in it) built from piece laws capped at length
//!   `m + 1`, with bound `(1 - l_n) / l_n` where `l_n` is the probability
//!   that no cap is exceeded ([`occupancy`]),
//! - exact transfer-kernel dynamic programming, Normal and Pólya-Aeppli
//!   baselines to compare against, and seeded Monte Carlo validation of the
//!   coin-toss construction ([`simulate`]).
//!
//! All operations are pure functions on immutable values; everything can be
//! shared freely across threads.

pub mod doeblin;
mod error;
pub mod occupancy;
pub mod simulate;
pub mod stochastic;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
pub use stochastic::{
    stationary_distribution, total_variation, ProbVector, StateSpace, StochasticMatrix, TargetSet,
};
