//! # sembound-core
//!
//! Semicontinuity bounds for entropy-type functions, with the machinery to
//! certify them numerically at desk scale.
//!
//! A semicontinuity bound is a one-sided inequality
//! `f(rho) - f(sigma) <= B(eps, constraints)` controlling how much an
//! entropy-type function `f` can jump upward when a state `rho` is perturbed
//! to `sigma` within distance `eps`. This crate implements three concrete
//! bound families and the generic mechanism behind them:
//!
//! - **Entropy under an energy constraint**: `S(rho) - S(sigma)` bounded via
//!   the maximal-entropy function `F_H` of a Hamiltonian spectrum
//!   ([`gibbs`], [`bounds::entropy_bound`]).
//! - **Entanglement of formation under a rank or energy constraint**
//!   ([`eof`]).
//! - **Shannon equivocation `H(X1|X2)` of discrete joint distributions**
//!   ([`entropy`], [`bounds::equivocation_bound`]).
//!
//! Each family comes in an `old` variant with correction term
//! `g(eps) = (1+eps) h2(eps/(1+eps))` and a `new` variant with the strictly
//! smaller `h2_tilde(eps)` (binary entropy capped at `ln 2`); the crate can
//! evaluate both and quantify the improvement.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`operator`] | density-matrix algebra: eigendecomposition, positive part, trace distance, partial trace, seeded random states |
//! | [`entropy`] | scalar entropy functions, correction terms, discrete joint distributions |
//! | [`gibbs`] | partition functions, inverse-temperature solving, Gibbs states, `F_H` |
//! | [`ensemble`] | discrete state ensembles, Jordan decomposition, the tau+/tau-/omega* construction, almost-affine moduli |
//! | [`eof`] | entanglement of formation: pure states, ensemble-optimization upper bounds, two-qubit concurrence oracle |
//! | [`bounds`] | the bound formulas and old-versus-new comparison |
//! | [`campaign`] | Monte-Carlo bound-violation campaigns |
//! | [`report`] | structured bound reports, CSV/JSON emission |
//! | [`tol`] | the tolerance ledger |
//!
//! All entropies are in nats. Conversion to bits is a presentation concern
//! (divide by `ln 2`).

// Domain checks use `!(x > 0.0)` so NaN is rejected along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

pub mod bounds;
pub mod campaign;
pub mod ensemble;
pub mod entropy;
pub mod eof;
pub mod gibbs;
mod linalg;
pub mod operator;
pub mod report;
mod rng;
pub mod tol;

pub use bounds::{compare_corrections, entropy_bound, equivocation_bound, Variant};
pub use ensemble::{DiscreteEnsemble, LaaFunction, ProbabilityMeasure};
pub use entropy::JointDistribution;
pub use eof::EnsembleDecomposition;
pub use gibbs::HamiltonianSpectrum;
pub use operator::{BipartiteDensityMatrix, DensityMatrix, HermitianMatrix, Subsystem};
pub use report::{BoundFamily, BoundReport, ReportFormat};

/// Errors for bound evaluation and the supporting numerics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entries have length {got}, expected {expected} for a {dim}x{dim} matrix")]
    BadShape {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not Hermitian (max entrywise deviation {max_dev:e})")]
    NotHermitian { max_dev: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state dimension {dim} does not factor as {dim_a} x {dim_b}")]
    BadFactorization {
        dim_a: usize,
        dim_b: usize,
        dim: usize,
    },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what} = {value} is outside its domain")]
    DomainViolation { what: &'static str, value: f64 },

    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("negative weight {value:e}")]
    NegativeWeight { value: f64 },

    #[error("vector norm is {norm}, expected 1")]
    NotUnitVector { norm: f64 },

    #[error("spectrum is invalid: {reason}")]
    InvalidSpectrum { reason: String },

    #[error("energy {energy} is not positive")]
    NonPositiveEnergy { energy: f64 },

    #[error("no inverse temperature exists: energy {energy} >= top level {max_level}")]
    EnergyAboveSpectrum { energy: f64, max_level: f64 },

    #[error("no bracket for the inverse temperature at energy {energy} (truncation too short?)")]
    BracketNotFound { energy: f64 },

    #[error("inverse temperature must be positive for a truncated spectrum (got {beta})")]
    NonPositiveBeta { beta: f64 },

    #[error("truncation tail is not negligible at beta = {beta} (tail ratio {ratio:e})")]
    TruncationNotConverged { beta: f64, ratio: f64 },

    #[error("iteration failed to converge: {what}")]
    ConvergenceFailure { what: String },

    #[error("could not reach the target perturbation distance after {attempts} attempts")]
    PerturbationFailed { attempts: u32 },

    #[error("representing measures coincide: decomposition is degenerate (eps = 0)")]
    DegenerateDecomposition,

    #[error("ensemble size {m} is below the state rank {rank}")]
    InfeasibleEnsembleSize { m: usize, rank: usize },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
