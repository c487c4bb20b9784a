//! Builds the benchmark family of chains in which transitions into a target
//! set are throttled by a factor `beta`.

use doeblin_markov::{Error, StochasticMatrix, TargetSet};

/// Rescales `q` so that every transition from outside the target set into it
/// is multiplied by `beta`, with the remaining row mass spread
/// proportionally over the non-target columns:
///
/// ```text
/// p(i, j) = (1 - beta q(i, T)) / (1 - q(i, T)) * q(i, j)   i, j outside T
/// p(i, j) = beta q(i, j)                                   i outside T, j in T
/// p(i, j) = q(i, j)                                        i in T
/// ```
///
/// `beta = 1` returns `q` unchanged; `beta = 0` removes every entry into the
/// target from outside. Rows indexed by the target always keep their base
/// transitions.
pub fn rarefy_target_transitions(
    q: &StochasticMatrix,
    beta: f64,
    target: &TargetSet,
) -> Result<StochasticMatrix, Error> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in [0, 1], got {beta}"
        )));
    }
    if target.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: target.dim(),
        });
    }
    if beta == 1.0 {
        // the formula collapses entrywise; return the base kernel untouched
        return Ok(q.clone());
    }
    let dim = q.dim();
    let mut rows = Vec::with_capacity(dim);
    for i in 0..dim {
        if target.contains(i) {
            rows.push(q.row(i).to_vec());
            continue;
        }
        let into_target: f64 = target.indices().iter().map(|&j| q.get(i, j)).sum();
        if into_target >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "row {i} sends all its mass into the target; the rescaling divides by zero"
            )));
        }
        let scale = (1.0 - beta * into_target) / (1.0 - into_target);
        let row = (0..dim)
            .map(|j| {
                if target.contains(j) {
                    beta * q.get(i, j)
                } else {
                    scale * q.get(i, j)
                }
            })
            .collect();
        rows.push(row);
    }
    StochasticMatrix::from_rows(&rows)
}
