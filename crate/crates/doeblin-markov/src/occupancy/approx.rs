//! Occupancy approximation from the memory-breaker decomposition, plus the
//! Normal and Pólya-Aeppli baselines it is benchmarked against.
//!
//! Memory-breaker times cut the first `n` transitions into independent
//! pieces. Conditioned on no piece exceeding a cap, the total count is a sum
//! of short, independent piece counts, so the whole law follows from piece
//! laws of length at most `m + 1` — computable in `O(m)` marking steps — and
//! a composition over piece lengths. The price of the cap is explicit: the
//! approximation is within `(1 - l_n) / l_n` of the exact law in total
//! variation, where `l_n` is the probability that the longest run of
//! non-breaker steps stays at or below `m`.

use crate::doeblin::DoeblinDecomposition;
use crate::error::{Error, Result};
use crate::occupancy::{CountDistribution, CountStateTable};
use crate::stochastic::{ProbVector, StochasticMatrix, TargetSet};

use statrs::distribution::{ContinuousCDF, Normal};

/// `P[L_n <= m]`: the probability that `n` independent tosses of a coin with
/// non-breaker probability `1 - alpha` contain no run of non-breakers longer
/// than `m`. Run-length DP in `O(n m)`.
pub fn longest_run_cdf(alpha: f64, n: usize, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if m >= n {
        return Ok(1.0);
    }
    if alpha <= 0.0 {
        // every toss extends the single run past any m < n
        return Err(Error::VacuousBound);
    }
    // state: current trailing run length, 0..=m
    let mut run = vec![0.0; m + 1];
    run[0] = 1.0;
    for _ in 0..n {
        let total: f64 = run.iter().sum();
        let mut next = vec![0.0; m + 1];
        next[0] = alpha * total;
        for r in 0..m {
            next[r + 1] = (1.0 - alpha) * run[r];
        }
        run = next;
    }
    Ok(run.iter().sum())
}

/// Piece-length cap from the concentration of the longest run around
/// `-ln(alpha n) / ln(1 - alpha)`: taking `c > 1` times that length makes the
/// error bound decay like `n^(1 - c)`. Result is clamped to `[1, n]`.
pub fn choose_m(alpha: f64, n: usize, c: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cap rule needs alpha in (0, 1), got {alpha}"
        )));
    }
    if alpha * n as f64 <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "cap rule needs alpha * n > 1, got alpha = {alpha}, n = {n}"
        )));
    }
    if c <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "cap rule needs c > 1, got {c}"
        )));
    }
    let raw = (-c * (alpha * n as f64).ln() / (1.0 - alpha).ln()).ceil();
    Ok((raw as usize).clamp(1, n))
}

/// Laws of the two kinds of trajectory pieces.
///
/// `u(l)` is the count collected over `l` residual steps started from the
/// chain's own initial distribution (the piece before the first breaker; the
/// starting state is not counted). `v(l)` is the count of an inner piece of
/// length `l`: a draw from the breaker distribution — counted if it lands in
/// the target — followed by `l - 1` residual steps.
#[derive(Debug, Clone)]
pub struct PieceLaws {
    u: Vec<CountDistribution>,
    v: Vec<CountDistribution>,
}

impl PieceLaws {
    /// `u(l)` for `l = 0..=cap`; `u(0)` is the point mass at zero.
    pub fn u(&self, l: usize) -> &CountDistribution {
        &self.u[l]
    }

    /// `v(l)` for `l = 1..=cap + 1`; supported on `{0, ..., l}`.
    pub fn v(&self, l: usize) -> &CountDistribution {
        &self.v[l - 1]
    }

    pub fn cap(&self) -> usize {
        self.u.len() - 1
    }
}

/// Builds every piece law up to the cap incrementally: each table is the
/// previous one advanced a single residual step.
pub fn piece_laws(
    mu: &ProbVector,
    dec: &DoeblinDecomposition,
    target: &TargetSet,
    cap: usize,
) -> Result<PieceLaws> {
    if !dec.has_memory_breaker() {
        return Err(Error::NoMemoryBreaker);
    }
    let residual = dec.residual();
    if mu.len() != residual.dim() || target.dim() != residual.dim() {
        return Err(Error::DimensionMismatch {
            expected: residual.dim(),
            found: mu.len(),
        });
    }
    let mut u = Vec::with_capacity(cap + 1);
    let mut table = CountStateTable::unmarked(mu);
    u.push(CountDistribution::point_mass(0, 0));
    for _ in 1..=cap {
        table.step(residual, target);
        u.push(table.count_law());
    }
    let mut v = Vec::with_capacity(cap + 1);
    let mut table = CountStateTable::marked(dec.e(), target);
    v.push(table.count_law());
    for _ in 2..=cap + 1 {
        table.step(residual, target);
        v.push(table.count_law());
    }
    Ok(PieceLaws { u, v })
}

/// The capped-piece approximation of the occupancy law together with its
/// exact error budget.
#[derive(Debug, Clone)]
pub struct CappedOccupancy {
    /// Law of the count under the condition that no piece exceeds the cap.
    pub law: CountDistribution,
    /// Total-variation bound `(1 - l_n) / l_n` against the exact law.
    pub bound: f64,
    /// `l_n = P[L_n <= m]`, computed by the independent run-length DP.
    pub cap_probability: f64,
    /// Total mass of the unnormalized composition sum; equals
    /// `cap_probability` up to floating-point error, and the agreement of
    /// the two routes is itself a correctness check.
    pub unnormalized_mass: f64,
    /// The cap that was used.
    pub cap: usize,
}

/// The occupancy approximation: convolves piece laws over every admissible
/// composition of `n` piece lengths via a suffix DP, conditioning on the
/// event that no piece exceeds the cap.
///
/// With `B(0)` the unit point mass at zero and
///
/// ```text
/// B(r) = sum_{l = 1..=min(cap + 1, r)} alpha (1 - alpha)^(l - 1) * v(l) ⊛ B(r - l)
/// A    = sum_{i = 0..=min(cap, n)}     (1 - alpha)^i            * u(i) ⊛ B(n - i)
/// ```
///
/// the mass of `A` is `l_n` and `A / l_n` is the conditioned law.
pub fn capped_occupancy(
    mu: &ProbVector,
    dec: &DoeblinDecomposition,
    target: &TargetSet,
    n: usize,
    cap: usize,
) -> Result<CappedOccupancy> {
    if !dec.has_memory_breaker() {
        return Err(Error::NoMemoryBreaker);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let alpha = dec.alpha();
    let pieces = piece_laws(mu, dec, target, cap)?;
    let cap_probability = match longest_run_cdf(alpha, n, cap) {
        Ok(l) => l,
        Err(Error::VacuousBound) => 0.0,
        Err(e) => return Err(e),
    };
    if cap_probability <= 0.0 {
        return Err(Error::VacuousBound);
    }

    // suffix[r]: unnormalized count law of filling r remaining transitions
    // with inner pieces; index by count, support at most r.
    let mut suffix: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    suffix.push(vec![1.0]);
    for r in 1..=n {
        let mut acc = vec![0.0; r + 1];
        for l in 1..=(cap + 1).min(r) {
            let weight = alpha * (1.0 - alpha).powi(l as i32 - 1);
            convolve_into(&mut acc, weight, pieces.v(l).weights(), &suffix[r - l]);
        }
        suffix.push(acc);
    }
    let mut law = vec![0.0; n + 1];
    for i in 0..=cap.min(n) {
        let weight = (1.0 - alpha).powi(i as i32);
        convolve_into(&mut law, weight, pieces.u(i).weights(), &suffix[n - i]);
    }
    let unnormalized_mass: f64 = law.iter().sum();
    for w in &mut law {
        *w /= cap_probability;
    }
    let sum: f64 = law.iter().sum();
    let law = CountDistribution::from_normalized(law.into_iter().map(|w| w / sum).collect());
    Ok(CappedOccupancy {
        law,
        bound: (1.0 - cap_probability) / cap_probability,
        cap_probability,
        unnormalized_mass,
        cap,
    })
}

/// `acc += weight * (a ⊛ b)`, truncated to the length of `acc`.
fn convolve_into(acc: &mut [f64], weight: f64, a: &[f64], b: &[f64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let wx = weight * x;
        for (j, &y) in b.iter().enumerate() {
            if let Some(slot) = acc.get_mut(i + j) {
                *slot += wx * y;
            }
        }
    }
}

/// Discretized Normal baseline on `{0, ..., n}` with continuity correction;
/// the end cells absorb both tails, so the weights sum to one exactly.
pub fn normal_approx(mean: f64, variance: f64, n: usize) -> Result<CountDistribution> {
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "variance must be non-negative, got {variance}"
        )));
    }
    if variance == 0.0 {
        let at = mean.round().clamp(0.0, n as f64) as usize;
        return Ok(CountDistribution::point_mass(n, at));
    }
    let sigma = variance.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let cdf = |x: f64| std_normal.cdf((x - mean) / sigma);
    let mut weights = vec![0.0; n + 1];
    for (k, w) in weights.iter_mut().enumerate() {
        let lo = if k == 0 { 0.0 } else { cdf(k as f64 - 0.5) };
        let hi = if k == n { 1.0 } else { cdf(k as f64 + 0.5) };
        *w = (hi - lo).max(0.0);
    }
    Ok(CountDistribution::from_normalized(weights))
}

/// Pólya-Aeppli law: a Poisson(`lambda`) number of clumps, each of
/// independent geometric size on `{1, 2, ...}` with `P[C = c] =
/// (1 - rho) rho^(c - 1)`. Evaluated by the compound-Poisson recursion
/// `P(k) = (lambda / k) sum_j j q_j P(k - j)`; mass beyond `n` is absorbed
/// into the last cell.
pub fn polya_aeppli(lambda: f64, rho: f64, n: usize) -> Result<CountDistribution> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    let mut pmf = vec![0.0; n + 1];
    pmf[0] = (-lambda).exp();
    for k in 1..=n {
        let mut acc = 0.0;
        let mut clump = 1.0 - rho; // q_j = (1 - rho) rho^(j - 1)
        for j in 1..=k {
            acc += j as f64 * clump * pmf[k - j];
            clump *= rho;
        }
        pmf[k] = lambda / k as f64 * acc;
    }
    if n > 0 {
        let head: f64 = pmf[..n].iter().sum();
        pmf[n] = (1.0 - head).max(0.0);
    } else {
        pmf[0] = 1.0;
    }
    Ok(CountDistribution::from_normalized(pmf))
}

/// Clump-heuristic parameters for a singleton target `{s}`: the clump-size
/// ratio is the self-loop probability `rho = p(s, s)` and the clump rate is
/// `lambda = n pi(s) (1 - rho)` under the stationary distribution.
pub fn polya_aeppli_params(
    p: &StochasticMatrix,
    target: &TargetSet,
    n: usize,
) -> Result<(f64, f64)> {
    if target.len() != 1 {
        return Err(Error::NonSingletonTarget);
    }
    let s = target.indices()[0];
    let rho = p.get(s, s);
    let pi = crate::stochastic::stationary_distribution(p)?;
    let lambda = n as f64 * pi.get(s) * (1.0 - rho);
    Ok((lambda, rho))
}
