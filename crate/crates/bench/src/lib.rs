//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratcheck_core::subspace::Frame;

/// `count` frames of `p` vectors in `R^n` with entries uniform in [-1, 1].
pub fn random_frames(count: usize, n: usize, p: usize, seed: u64) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let vs = (0..p)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            Frame::new(vs, n).expect("finite")
        })
        .collect()
}

/// Points of norm `rho` in `R^n`.
pub fn random_points(count: usize, n: usize, rho: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = rho / v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c * s).collect()
        })
        .collect()
}
