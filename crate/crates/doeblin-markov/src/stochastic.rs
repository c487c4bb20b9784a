//! Foundational types: state spaces, row-stochastic matrices, probability
//! vectors, target sets, and the exact linear-algebra operations on them.

use crate::error::{Error, Result};

/// Row sums (and weight sums) may deviate from 1 by at most this much before
/// construction rejects the input. Anything closer is renormalized.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Entries below this are rejected as genuinely negative; values in
/// `[NEG_TOLERANCE, 0)` are treated as floating-point noise and clamped to 0.
pub const NEG_TOLERANCE: f64 = -1e-12;

/// An ordered, finite set of named states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    /// Builds a state space from distinct labels. Indices `0..len` map to the
    /// labels in the given order.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidStateSpace);
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].iter().any(|b| b == a) {
                return Err(Error::InvalidStateSpace);
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty label lists
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A probability distribution over `0..len`, stored densely.
///
/// Construction validates non-negativity and that the weights sum to 1 within
/// [`SUM_TOLERANCE`], then renormalizes exactly. Sub-probability vectors are
/// handled internally as plain slices and never wrapped in this type.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    weights: Vec<f64>,
}

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::WeightSumOffOne { sum: 0.0 });
        }
        let mut weights = weights;
        for (i, w) in weights.iter_mut().enumerate() {
            if *w < NEG_TOLERANCE {
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
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::WeightSumOffOne { sum });
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Self { weights })
    }

    /// Uniform distribution over `len` states.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution needs at least one state");
        Self {
            weights: vec![1.0 / len as f64; len],
        }
    }

    /// Point mass on `at`.
    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass index out of range");
        let mut weights = vec![0.0; len];
        weights[at] = 1.0;
        Self { weights }
    }

    /// Internal constructor for values already known to be a distribution.
    pub(crate) fn from_normalized(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// One step of the chain: the row vector `self * p`.
    pub fn propagate(&self, p: &StochasticMatrix) -> Result<Self> {
        if p.dim() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: p.dim(),
            });
        }
        let dim = self.len();
        let mut out = vec![0.0; dim];
        for (i, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * p.get(i, j);
            }
        }
        Ok(Self::from_normalized(out))
    }

    /// Total mass placed on the target set.
    pub fn mass_on(&self, target: &TargetSet) -> f64 {
        target.indices().iter().map(|&j| self.weights[j]).sum()
    }
}

/// Total variation distance `sup_A |u(A) - v(A)| = (1/2) * sum_i |u(i) - v(i)|`.
pub fn total_variation(u: &ProbVector, v: &ProbVector) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(tv_slices(u.as_slice(), v.as_slice()))
}

/// Half L1 distance of two equal-or-unequal-length nonnegative sequences,
/// treating missing entries as zero.
pub(crate) fn tv_slices(u: &[f64], v: &[f64]) -> f64 {
    let long = u.len().max(v.len());
    let mut acc = 0.0;
    for i in 0..long {
        let a = u.get(i).copied().unwrap_or(0.0);
        let b = v.get(i).copied().unwrap_or(0.0);
        acc += (a - b).abs();
    }
    0.5 * acc
}

/// A square row-stochastic matrix: the transition kernel of a finite chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    data: Vec<f64>, // row-major
}

impl StochasticMatrix {
    /// Validates and builds a kernel from rows. Rows whose sums are within
    /// [`SUM_TOLERANCE`] of 1 are renormalized; larger deviations are
    /// rejected, as are entries below [`NEG_TOLERANCE`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            let start = data.len();
            for (j, &x) in row.iter().enumerate() {
                if x < NEG_TOLERANCE {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
                let x = x.max(0.0);
                sum += x;
                data.push(x);
            }
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::RowSumOffOne { row: i, sum });
            }
            for x in &mut data[start..] {
                *x /= sum;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0);
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    /// The rank-one kernel whose every row equals `e`: an i.i.d. model.
    pub fn iid(e: &ProbVector) -> Self {
        let dim = e.len();
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            data.extend_from_slice(e.as_slice());
        }
        Self { dim, data }
    }

    /// Internal constructor for entries already known to be row-stochastic.
    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Exact matrix product `self * rhs`.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let dim = self.dim;
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for s in 0..dim {
                let a = self.get(i, s);
                if a == 0.0 {
                    continue;
                }
                let rhs_row = rhs.row(s);
                let out_row = &mut data[i * dim..(i + 1) * dim];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim, data })
    }

    /// `self^k` by repeated squaring; `k = 0` yields the identity.
    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.multiply(&base).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                base = base.multiply(&base).expect("same dimension");
            }
        }
        result
    }

    /// Column-wise minima, the building block of the Doeblin coefficient.
    pub fn column_minima(&self) -> Vec<f64> {
        let mut minima = self.row(0).to_vec();
        for row in self.rows().skip(1) {
            for (m, &x) in minima.iter_mut().zip(row) {
                if x < *m {
                    *m = x;
                }
            }
        }
        minima
    }
}

/// A subset of the state indices, kept both as a sorted index list and as a
/// membership mask for O(1) lookups in dynamic-programming inner loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSet {
    dim: usize,
    mask: Vec<bool>,
    indices: Vec<usize>,
}

impl TargetSet {
    /// Builds a target set over a state space of size `dim`. Duplicate
    /// indices are collapsed; empty sets are allowed (useful for trivial
    /// cases — every occupancy count is then 0).
    pub fn new<I: IntoIterator<Item = usize>>(indices: I, dim: usize) -> Result<Self> {
        let mut mask = vec![false; dim];
        for index in indices {
            if index >= dim {
                return Err(Error::StateOutOfRange { index, dim });
            }
            mask[index] = true;
        }
        let indices = (0..dim).filter(|&i| mask[i]).collect();
        Ok(Self { dim, mask, indices })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            mask: vec![false; dim],
            indices: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            mask: vec![true; dim],
            indices: (0..dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn contains(&self, state: usize) -> bool {
        self.mask[state]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is `n x n` row-major and is destroyed.
pub(crate) fn solve_linear(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale: f64 = a.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .partial_cmp(&a[s * n + col].abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if a[pivot_row * n + col].abs() < 1e-13 * scale {
            return Err(Error::SingularSystem);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for j in col + 1..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// The unique distribution with `pi * p = pi`, found by a direct linear
/// solve: one balance equation is replaced by the normalization constraint.
///
/// Fails with [`Error::SingularSystem`] when the stationary distribution is
/// not unique (several recurrent classes). A single recurrent class is
/// enough; full irreducibility is not required.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<ProbVector> {
    let n = p.dim();
    // Rows of the system are (I - p^T); the last row becomes sum(pi) = 1.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = ((i == j) as u8 as f64) - p.get(j, i);
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    let x = solve_linear(&mut a, &mut b, n)?;
    if x.iter().any(|&v| v < -1e-9) {
        return Err(Error::SingularSystem);
    }
    let sum: f64 = x.iter().map(|&v| v.max(0.0)).sum();
    let pi = ProbVector::from_normalized(x.iter().map(|&v| v.max(0.0) / sum).collect());
    // Guard against a numerically consistent but non-stationary solution.
    let residual = tv_slices(pi.propagate(p)?.as_slice(), pi.as_slice());
    if residual > 1e-8 {
        return Err(Error::SingularSystem);
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn three_state_example() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[
            vec![0.3, 0.0, 0.7],
            vec![0.0, 0.9, 0.1],
            vec![0.8, 0.2, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn state_space_rejects_duplicates() {
        assert!(StateSpace::new(["a", "b", "a"]).is_err());
        assert!(StateSpace::new(Vec::<String>::new()).is_err());
        let s = StateSpace::new(["x", "y"]).unwrap();
        assert_eq!(s.index_of("y"), Some(1));
        assert_eq!(s.index_of("z"), None);
        assert_eq!(s.label(0), "x");
    }

    #[test]
    fn matrix_construction_validates() {
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.6, 0.6]]),
            Err(Error::RowSumOffOne { row: 1, .. })
        ));
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![1.1, -0.1], vec![0.5, 0.5]]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(StochasticMatrix::from_rows(&[vec![0.5, 0.5, 0.0]]).is_err());
        // within tolerance: renormalized instead of rejected
        let m = StochasticMatrix::from_rows(&[vec![0.5 + 4e-10, 0.5], vec![0.25, 0.75 - 4e-10]])
            .unwrap();
        for row in m.rows() {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn multiply_identity_is_noop() {
        let p = three_state_example();
        let same = p.multiply(&StochasticMatrix::identity(3)).unwrap();
        assert_eq!(p, same);
    }

    #[test]
    fn square_of_three_state_example() {
        // published fractions: row 1 of p^2 is (13/20, 7/50, 21/100)
        let p = three_state_example();
        let p2 = p.multiply(&p).unwrap();
        let expected = [
            [13.0 / 20.0, 7.0 / 50.0, 21.0 / 100.0],
            [2.0 / 25.0, 83.0 / 100.0, 9.0 / 100.0],
            [6.0 / 25.0, 9.0 / 50.0, 29.0 / 50.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(p2.get(i, j), expected[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn multiply_matches_naive_triple_loop() {
        let (a, b) = {
            let mut rng = crate::testutil::rng(7);
            (
                crate::testutil::random_matrix(&mut rng, 4),
                crate::testutil::random_matrix(&mut rng, 4),
            )
        };
        let prod = a.multiply(&b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for s in 0..4 {
                    acc += a.get(i, s) * b.get(s, j);
                }
                assert_abs_diff_eq!(prod.get(i, j), acc, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pow_zero_is_identity_and_pow_two_matches_multiply() {
        let p = three_state_example();
        assert_eq!(p.pow(0), StochasticMatrix::identity(3));
        let p2 = p.multiply(&p).unwrap();
        let pow2 = p.pow(2);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(pow2.get(i, j), p2.get(i, j), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn seventh_power_matches_published_digits() {
        let p7 = three_state_example().pow(7);
        let expected = [
            [0.3444507, 0.3440640, 0.3114853],
            [0.1966080, 0.6114381, 0.1919539],
            [0.3559832, 0.3839078, 0.2601090],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(p7.get(i, j), expected[i][j], epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn pow_is_additive_in_the_exponent() {
        let p = three_state_example();
        for (a, b) in [(1u64, 3u64), (2, 5), (4, 4), (0, 6)] {
            let lhs = p.pow(a + b);
            let rhs = p.pow(a).multiply(&p.pow(b)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(lhs.get(i, j), rhs.get(i, j), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn total_variation_basics() {
        let u = ProbVector::new(vec![0.2, 0.8]).unwrap();
        assert_eq!(total_variation(&u, &u).unwrap(), 0.0);
        let d0 = ProbVector::point_mass(3, 0);
        let d1 = ProbVector::point_mass(3, 1);
        assert_abs_diff_eq!(total_variation(&d0, &d1).unwrap(), 1.0);
        let short = ProbVector::uniform(2);
        assert!(total_variation(&d0, &short).is_err());
    }

    #[test]
    fn total_variation_matches_subset_supremum() {
        // sup_A |u(A) - v(A)| by brute force over all 2^len subsets
        let mut rng = crate::testutil::rng(11);
        for _ in 0..20 {
            let u = crate::testutil::random_prob_vector(&mut rng, 6);
            let v = crate::testutil::random_prob_vector(&mut rng, 6);
            let tv = total_variation(&u, &v).unwrap();
            let mut sup: f64 = 0.0;
            for mask in 0u32..(1 << 6) {
                let mut du = 0.0;
                let mut dv = 0.0;
                for i in 0..6 {
                    if mask >> i & 1 == 1 {
                        du += u.get(i);
                        dv += v.get(i);
                    }
                }
                sup = sup.max((du - dv).abs());
            }
            assert_abs_diff_eq!(tv, sup, epsilon = 1e-12);
        }
    }

    #[test]
    fn stationary_of_iid_model_is_the_common_row() {
        let e = ProbVector::new(vec![0.5, 0.2, 0.3]).unwrap();
        let pi = stationary_distribution(&StochasticMatrix::iid(&e)).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(pi.get(i), e.get(i), epsilon = 1e-14);
        }
    }

    #[test]
    fn stationary_of_three_state_example() {
        let p = three_state_example();
        let pi = stationary_distribution(&p).unwrap();
        // closed form: (8/29, 14/29, 7/29)
        assert_abs_diff_eq!(pi.get(0), 8.0 / 29.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.get(1), 14.0 / 29.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.get(2), 7.0 / 29.0, epsilon = 1e-12);
        let moved = pi.propagate(&p).unwrap();
        assert!(total_variation(&moved, &pi).unwrap() <= 1e-12);
        // after 7 steps, some row is still at least 0.13 away from pi
        let p7 = p.pow(7);
        let worst = (0..3)
            .map(|i| {
                let row = ProbVector::from_normalized(p7.row(i).to_vec());
                total_variation(&row, &pi).unwrap()
            })
            .fold(0.0f64, f64::max);
        assert!(
            worst >= 0.13,
            "rows of p^7 too close to stationarity: {worst}"
        );
    }

    #[test]
    fn stationary_matches_power_iteration() {
        let mut rng = crate::testutil::rng(23);
        for _ in 0..10 {
            let p = crate::testutil::random_matrix(&mut rng, 5);
            let pi = stationary_distribution(&p).unwrap();
            let mut v = ProbVector::uniform(5);
            for _ in 0..20_000 {
                v = v.propagate(&p).unwrap();
            }
            assert!(total_variation(&pi, &v).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn stationary_detects_two_closed_classes() {
        let p = StochasticMatrix::from_rows(&[
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.0, 0.0, 0.5, 0.5],
        ])
        .unwrap();
        assert!(matches!(
            stationary_distribution(&p),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn propagation_is_contractive_in_total_variation() {
        let mut rng = crate::testutil::rng(31);
        for _ in 0..100 {
            let p = crate::testutil::random_matrix(&mut rng, 4);
            let u = crate::testutil::random_prob_vector(&mut rng, 4);
            let v = crate::testutil::random_prob_vector(&mut rng, 4);
            let before = total_variation(&u, &v).unwrap();
            let after =
                total_variation(&u.propagate(&p).unwrap(), &v.propagate(&p).unwrap()).unwrap();
            assert!(after <= before + 1e-12);
        }
    }

    #[test]
    fn target_set_bounds_and_mass() {
        assert!(TargetSet::new([3], 3).is_err());
        let t = TargetSet::new([2, 0, 2], 3).unwrap();
        assert_eq!(t.indices(), &[0, 2]);
        assert!(t.contains(0) && !t.contains(1));
        let u = ProbVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_abs_diff_eq!(u.mass_on(&t), 0.7);
        assert_eq!(u.mass_on(&TargetSet::empty(3)), 0.0);
        assert_abs_diff_eq!(u.mass_on(&TargetSet::full(3)), 1.0);
    }
}
