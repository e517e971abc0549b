//! Input builders shared by the criterion benches.

use sembound_core::ensemble::{DiscreteEnsemble, ProbabilityMeasure};
use sembound_core::operator::{random_density, BipartiteDensityMatrix, DensityMatrix};
use sembound_core::HamiltonianSpectrum;

pub fn hermitian_input(dim: usize, seed: u64) -> DensityMatrix {
    random_density(dim, dim, seed).expect("valid dims")
}

pub fn linear_spectrum() -> HamiltonianSpectrum {
    HamiltonianSpectrum::linear(1.0, 512).expect("valid spectrum")
}

pub fn two_qubit_state(rank: usize, seed: u64) -> BipartiteDensityMatrix {
    BipartiteDensityMatrix::new(2, 2, random_density(4, rank, seed).expect("valid dims"))
        .expect("valid factorization")
}

pub fn decomposition_instance(
    n: usize,
    dim: usize,
    seed: u64,
) -> (DiscreteEnsemble, ProbabilityMeasure, ProbabilityMeasure) {
    let kernel: Vec<DensityMatrix> = (0..n)
        .map(|i| random_density(dim, (i % dim) + 1, seed + i as u64).expect("valid dims"))
        .collect();
    let ens = DiscreteEnsemble::from_kernel(kernel).expect("nonempty kernel");
    // deterministic overlapping measures
    let mut mu: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7 + 3) % 11) as f64).collect();
    let mut nu: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 5 + 1) % 13) as f64).collect();
    let (su, sv): (f64, f64) = (mu.iter().sum(), nu.iter().sum());
    mu.iter_mut().for_each(|x| *x /= su);
    nu.iter_mut().for_each(|x| *x /= sv);
    (
        ens,
        ProbabilityMeasure::new(mu).expect("normalized"),
        ProbabilityMeasure::new(nu).expect("normalized"),
    )
}
