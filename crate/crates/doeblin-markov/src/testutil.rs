//! Seeded generators shared by the test suites. Not part of the public API.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stochastic::{ProbVector, StochasticMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly positive random kernel (irreducible, aperiodic, alpha > 0).
pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> StochasticMatrix {
    let rows: Vec<Vec<f64>> = (0..dim).map(|_| random_simplex(rng, dim, 0.02)).collect();
    StochasticMatrix::from_rows(&rows).expect("generated rows are stochastic")
}

/// Random kernel with a zero planted in every column, so alpha = 0.
#[allow(clippy::needless_range_loop)]
pub fn random_matrix_alpha_zero(rng: &mut ChaCha8Rng, dim: usize) -> StochasticMatrix {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..dim).map(|_| random_simplex(rng, dim, 0.02)).collect();
        for col in 0..dim {
            let row = rng.random_range(0..dim);
            rows[row][col] = 0.0;
        }
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|x| x / s).collect()
            })
            .collect();
        // planting zeros can leave an all-zero row in tiny dimensions
        if rows.iter().all(|r| r.iter().sum::<f64>() > 0.5) {
            return StochasticMatrix::from_rows(&rows).expect("renormalized rows");
        }
    }
}

pub fn random_prob_vector(rng: &mut ChaCha8Rng, len: usize) -> ProbVector {
    ProbVector::new(random_simplex(rng, len, 0.0)).expect("simplex point")
}

fn random_simplex(rng: &mut ChaCha8Rng, len: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| floor + rng.random::<f64>()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Eight-state base kernel used by the occupancy benchmark suites. State 8
/// (index 7) is the rare target.
pub fn benchmark_eight_state() -> Vec<Vec<f64>> {
    vec![
        vec![0.334, 0.215, 0.173, 0.119, 0.065, 0.086, 0.003, 0.005],
        vec![0.289, 0.133, 0.211, 0.133, 0.067, 0.156, 0.007, 0.004],
        vec![0.356, 0.184, 0.075, 0.043, 0.151, 0.183, 0.002, 0.006],
        vec![0.41, 0.162, 0.108, 0.075, 0.14, 0.097, 0.005, 0.003],
        vec![0.316, 0.239, 0.044, 0.218, 0.076, 0.098, 0.004, 0.005],
        vec![0.44, 0.176, 0.044, 0.242, 0.088, 0.0, 0.005, 0.005],
        vec![0.18, 0.06, 0.19, 0.09, 0.13, 0.1, 0.13, 0.12],
        vec![0.2, 0.16, 0.07, 0.1, 0.14, 0.1, 0.09, 0.14],
    ]
}
