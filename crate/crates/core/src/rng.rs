//! Seeded random number plumbing shared by generators and campaigns.
//!
//! All randomness in the crate flows through `ChaCha8Rng` so that a `u64`
//! seed pins every output bit-exactly, independent of platform.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial stream: same master seed, stream = trial index.
pub(crate) fn trial(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian via Box-Muller (unit variance per component).
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    // u1 in [0,1): flip to (0,1] so the log is finite.
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

/// Exponential(1) sample.
pub(crate) fn exponential<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Flat Dirichlet sample: normalized vector of Exponential(1) draws.
pub(crate) fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| exponential(rng)).collect();
    let sum: f64 = w.iter().sum();
    for x in &mut w {
        *x /= sum;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_are_reproducible() {
        let a: Vec<f64> = {
            let mut r = trial(7, 3);
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        let b: Vec<f64> = {
            let mut r = trial(7, 3);
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut r = trial(7, 4);
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn dirichlet_normalizes() {
        let mut r = seeded(1);
        let w = dirichlet(&mut r, 12);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x >= 0.0));
    }
}
