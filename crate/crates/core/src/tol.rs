//! Tolerance ledger.
//!
//! Every numerical threshold used for validation, convergence, and test
//! acceptance lives here, so there is a single place to audit them.

/// Max entrywise deviation `|m[i][j] - conj(m[j][i])|` tolerated by
/// [`crate::operator::HermitianMatrix`].
pub const HERMITICITY: f64 = 1e-12;

/// Tolerated deviation of `tr rho` from 1 for a density matrix.
pub const UNIT_TRACE: f64 = 1e-12;

/// Smallest admissible eigenvalue of a density matrix. Eigenvalues in
/// `[EIG_FLOOR, 0)` are treated as exact zeros by spectral functions.
pub const EIG_FLOOR: f64 = -1e-10;

/// Spectral reconstruction and decomposition-identity tolerance
/// (`sum_i lambda_i v_i v_i*` versus the input, Jordan/barycenter identities).
pub const RECONSTRUCTION: f64 = 1e-10;

/// Orthonormality tolerance for eigenvector columns.
pub const ORTHONORMALITY: f64 = 1e-10;

/// Tolerated deviation of a probability vector's sum from 1.
pub const NORMALIZATION: f64 = 1e-12;

/// Positive/negative Jordan masses of a signed measure must agree with the
/// total-variation distance to within this.
pub const MASS_IDENTITY: f64 = 1e-14;

/// Norm deviation tolerated when a unit vector is required.
pub const UNIT_VECTOR: f64 = 1e-12;

/// Inverse-temperature solve: `|mean_energy(beta) - E| <= BETA_SOLVE * max(1, E)`.
pub const BETA_SOLVE: f64 = 1e-10;

/// A solved Gibbs state must reproduce the requested mean energy to within this.
pub const GIBBS_MEAN_ENERGY: f64 = 1e-9;

/// Relative truncation-tail threshold for the Gibbs-condition certificate:
/// `exp(-beta_min * e_N) * N <= TAIL_CERTIFICATE * Z_N`.
pub const TAIL_CERTIFICATE: f64 = 1e-9;

/// A bound evaluation counts as violated when `bound - lhs < VIOLATION_SLACK`.
pub const VIOLATION_SLACK: f64 = -1e-9;

/// Eigenvalue threshold for numerical rank decisions.
pub const NUMERICAL_RANK: f64 = 1e-9;

/// Pure-state ensembles must reconstruct their average state to within this
/// (max entrywise deviation).
pub const ENSEMBLE_RECONSTRUCTION: f64 = 1e-9;
