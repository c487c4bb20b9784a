//! Ergodicity coefficients, the memory-breaker decomposition, state-mixture
//! approximations, and the matrix-power planner.

use crate::error::{Error, Result};
use crate::stochastic::{solve_linear, ProbVector, StochasticMatrix};

/// Doeblin's ergodicity coefficient: the sum over columns of the column-wise
/// minimum. Always in `[0, 1]`; equals 1 exactly on i.i.d. models.
pub fn doeblin_alpha(p: &StochasticMatrix) -> f64 {
    p.column_minima().iter().sum()
}

/// The classical comparison coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaCoefficient {
    /// `max_j min_i p(i, j)` — not proper.
    Gamma1,
    /// Markov's coefficient `1 - (1/2) max_{i,j} sum_s |p(i,s) - p(j,s)|`.
    Gamma2,
    /// `1 - max_s max_{i,j} |p(i,s) - p(j,s)|`.
    Gamma3,
}

/// Evaluates the requested coefficient by its defining formula.
pub fn ergodicity_gamma(p: &StochasticMatrix, which: GammaCoefficient) -> f64 {
    let dim = p.dim();
    match which {
        GammaCoefficient::Gamma1 => p.column_minima().into_iter().fold(0.0f64, f64::max),
        GammaCoefficient::Gamma2 => {
            let mut worst: f64 = 0.0;
            for i in 0..dim {
                for j in i + 1..dim {
                    let l1: f64 = p
                        .row(i)
                        .iter()
                        .zip(p.row(j))
                        .map(|(a, b)| (a - b).abs())
                        .sum();
                    worst = worst.max(l1);
                }
            }
            1.0 - 0.5 * worst
        }
        GammaCoefficient::Gamma3 => {
            let mut worst: f64 = 0.0;
            for s in 0..dim {
                for i in 0..dim {
                    for j in i + 1..dim {
                        worst = worst.max((p.get(i, s) - p.get(j, s)).abs());
                    }
                }
            }
            1.0 - worst
        }
    }
}

/// Evaluates both sides of the sub-multiplicativity inequality
/// `1 - alpha(p q) <= (1 - alpha(p)) (1 - alpha(q))` and returns
/// `(lhs, rhs)`.
pub fn check_submultiplicative(p: &StochasticMatrix, q: &StochasticMatrix) -> Result<(f64, f64)> {
    let product = p.multiply(q)?;
    let lhs = 1.0 - doeblin_alpha(&product);
    let rhs = (1.0 - doeblin_alpha(p)) * (1.0 - doeblin_alpha(q));
    Ok((lhs, rhs))
}

/// When `1 - alpha` is below this, the kernel is treated as an exact i.i.d.
/// model and the residual choice is arbitrary.
const ALPHA_ONE_TOLERANCE: f64 = 1e-12;

/// The split `p = alpha * E + (1 - alpha) * M` with `E` rank-one.
///
/// At the maximal `alpha` (the Doeblin coefficient) the factors are unique:
/// `e(j) = min_s p(s, j) / alpha` and `M = (p - alpha E) / (1 - alpha)`,
/// which has a zero in every column. Two degenerate corners:
///
/// - `alpha = 0`: there is no memory-breaker; `M = p` and `e` is a uniform
///   placeholder that [`has_memory_breaker`](Self::has_memory_breaker)
///   flags as unusable.
/// - `alpha = 1`: `p` is itself rank-one and any residual works; `M` is set
///   to `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoeblinDecomposition {
    alpha: f64,
    e: ProbVector,
    residual: StochasticMatrix,
    source: StochasticMatrix,
}

impl DoeblinDecomposition {
    /// Decomposes at the maximal weight `alpha(p)`.
    pub fn new(p: &StochasticMatrix) -> Self {
        Self::build(p, doeblin_alpha(p))
    }

    /// Decomposes at a caller-supplied `alpha <= alpha(p)`, for experiments
    /// with sub-optimal splits. The residual is then a convex combination of
    /// the maximal-split factors and need not have zero columns.
    pub fn with_alpha(p: &StochasticMatrix, alpha: f64) -> Result<Self> {
        let max = doeblin_alpha(p);
        if !(0.0..=1.0).contains(&alpha) || alpha > max + 1e-12 {
            return Err(Error::AlphaTooLarge {
                requested: alpha,
                max,
            });
        }
        Ok(Self::build(p, alpha.min(max)))
    }

    fn build(p: &StochasticMatrix, alpha: f64) -> Self {
        let dim = p.dim();
        if alpha <= 0.0 {
            return Self {
                alpha: 0.0,
                e: ProbVector::uniform(dim),
                residual: p.clone(),
                source: p.clone(),
            };
        }
        let minima = p.column_minima();
        let e: Vec<f64> = minima.iter().map(|&m| m / doeblin_alpha(p)).collect();
        let e_sum: f64 = e.iter().sum();
        let e = ProbVector::from_normalized(e.iter().map(|&x| x / e_sum).collect());
        if 1.0 - alpha < ALPHA_ONE_TOLERANCE {
            let residual = StochasticMatrix::iid(&e);
            return Self {
                alpha: 1.0,
                e,
                residual,
                source: p.clone(),
            };
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let raw = (p.get(i, j) - alpha * e.get(j)) / (1.0 - alpha);
                data[i * dim + j] = raw.max(0.0);
            }
        }
        let residual = StochasticMatrix::from_raw(dim, data);
        Self {
            alpha,
            e,
            residual,
            source: p.clone(),
        }
    }

    /// The coin bias: probability that a step is a memory-breaker.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The memory-breaker distribution (rows of `E`). Meaningless when
    /// `alpha = 0`; check [`has_memory_breaker`](Self::has_memory_breaker).
    pub fn e(&self) -> &ProbVector {
        &self.e
    }

    /// The residual kernel `M`.
    pub fn residual(&self) -> &StochasticMatrix {
        &self.residual
    }

    /// The decomposed kernel `p`.
    pub fn source(&self) -> &StochasticMatrix {
        &self.source
    }

    /// False exactly when `alpha = 0`, in which case `e` is a placeholder
    /// and every mixture/bound built from this decomposition is vacuous.
    pub fn has_memory_breaker(&self) -> bool {
        self.alpha > 0.0
    }

    /// The mixture `sum_t P[I = t] e M^t` with truncated-geometric weights
    /// `P[I = t] = alpha (1 - alpha)^t / (1 - (1 - alpha)^(m + 1))` for
    /// `t = 0..=m`. For every `n > m` it approximates the state distribution
    /// `mu p^n` within `(1 - alpha)^(m + 1)` in total variation, regardless
    /// of `mu`.
    pub fn state_mixture(&self, m: usize) -> Result<ProbVector> {
        if !self.has_memory_breaker() {
            return Err(Error::NoMemoryBreaker);
        }
        let alpha = self.alpha;
        let norm = 1.0 - (1.0 - alpha).powi(m as i32 + 1);
        let dim = self.e.len();
        let mut mix = vec![0.0; dim];
        let mut component = self.e.clone();
        for t in 0..=m {
            let weight = alpha * (1.0 - alpha).powi(t as i32) / norm;
            for (acc, &x) in mix.iter_mut().zip(component.as_slice()) {
                *acc += weight * x;
            }
            if t < m {
                component = component.propagate(&self.residual)?;
            }
        }
        let sum: f64 = mix.iter().sum();
        Ok(ProbVector::from_normalized(
            mix.into_iter().map(|x| x / sum).collect(),
        ))
    }

    /// The tail weight `(1 - alpha)^(m + 1)`: the total-variation bound that
    /// comes with [`state_mixture`](Self::state_mixture).
    pub fn state_mixture_bound(&self, m: usize) -> f64 {
        (1.0 - self.alpha).powi(m as i32 + 1)
    }

    /// The stationary distribution through the resolvent formula
    /// `pi = alpha e (I - (1 - alpha) M)^{-1}`, available whenever
    /// `alpha > 0`. Agrees with the direct balance-equation solve, and the
    /// state distribution converges to it at rate `2 (1 - alpha)^n`.
    pub fn stationary(&self) -> Result<ProbVector> {
        if !self.has_memory_breaker() {
            return Err(Error::NoMemoryBreaker);
        }
        if 1.0 - self.alpha < ALPHA_ONE_TOLERANCE {
            return Ok(self.e.clone());
        }
        let dim = self.e.len();
        // x (I - (1 - alpha) M) = alpha e, transposed for the column solver.
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                a[i * dim + j] =
                    ((i == j) as u8 as f64) - (1.0 - self.alpha) * self.residual.get(j, i);
            }
        }
        let mut b: Vec<f64> = self.e.as_slice().iter().map(|&x| self.alpha * x).collect();
        let x = solve_linear(&mut a, &mut b, dim)?;
        let sum: f64 = x.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::SingularSystem);
        }
        Ok(ProbVector::from_normalized(
            x.into_iter().map(|v| (v / sum).max(0.0)).collect(),
        ))
    }

    /// Convergence bound for the stationary approximation:
    /// `|mu p^n - pi| <= 2 (1 - alpha)^n`.
    pub fn stationary_bound(&self, n: u64) -> f64 {
        2.0 * (1.0 - self.alpha).powi(n as i32)
    }
}

/// One row of the power plan: the cost of approximating state distributions
/// through the decomposition of `p^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPlanRow {
    pub k: u64,
    /// `alpha(p^k)`.
    pub alpha: f64,
    /// Mixture cap: smallest `m` with `(1 - alpha)^(m + 1) <= epsilon`;
    /// `None` when `alpha = 0` (no finite cap works).
    pub m: Option<u64>,
    /// Smallest horizon covered, `k (m + 1)`.
    pub n: Option<u64>,
    /// Matrix multiplications needed, `k + m`.
    pub c: Option<u64>,
}

/// Evaluates the plan rows for `k = 1..=k_max` at accuracy `epsilon`.
pub fn power_plan(p: &StochasticMatrix, k_max: u64, epsilon: f64) -> Result<Vec<PowerPlanRow>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let mut rows = Vec::with_capacity(k_max as usize);
    let mut power = p.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = power.multiply(p)?;
        }
        let alpha = doeblin_alpha(&power);
        let m = if alpha <= 0.0 {
            None
        } else if 1.0 - alpha < ALPHA_ONE_TOLERANCE {
            Some(0)
        } else {
            let exact = epsilon.ln() / (1.0 - alpha).ln() - 1.0;
            Some(exact.ceil().max(0.0) as u64)
        };
        rows.push(PowerPlanRow {
            k,
            alpha,
            m,
            n: m.map(|m| k * (m + 1)),
            c: m.map(|m| k + m),
        });
    }
    Ok(rows)
}
