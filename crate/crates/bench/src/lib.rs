//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use verbsense::synth::{generate_synthetic, SyntheticData, SyntheticSpec};
use verbsense::{DMatrix, DVector, TrainingSet};

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_points(n: usize, dim: usize, seed: u64) -> Vec<DVector<f64>> {
    let m = gaussian_matrix(n, dim, seed);
    m.row_iter().map(|r| r.transpose()).collect()
}

/// `m` examples mapping `d_in` inputs to `d_out` outputs.
pub fn regression_problem(m: usize, d_in: usize, d_out: usize, seed: u64) -> TrainingSet {
    TrainingSet::new(gaussian_matrix(m, d_in, seed), gaussian_matrix(m, d_out, seed + 1)).expect("row counts agree")
}

/// The default planted-sense corpus.
pub fn synthetic(seed: u64) -> SyntheticData {
    generate_synthetic(&SyntheticSpec {
        seed,
        ..SyntheticSpec::default()
    })
    .expect("default spec is feasible")
}
