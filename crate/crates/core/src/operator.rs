//! Finite-dimensional Hermitian and density-matrix algebra.
//!
//! Complex scalars are explicit pairs of `f64` (`num_complex::Complex64`),
//! matrices are row-major. All spectral operations route through the Jacobi
//! eigensolver in `linalg`, so there is exactly one numerical kernel to
//! trust. Values are immutable after construction and safe to share across
//! threads.
//!
//! Bipartite states fix the **A-major** index convention: the basis vector
//! `|a>|b>` of `H_A (x) H_B` sits at index `a * dim_b + b`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{linalg, rng, tol, Error, Result};

/// A Hermitian matrix: `m = m†` within [`tol::HERMITICITY`] entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Eigensystem of a Hermitian matrix: real eigenvalues sorted ascending and
/// orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    dim: usize,
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    vectors: Vec<Complex64>, // column-major
}

impl Eigendecomposition {
    /// Eigenvector belonging to `values[j]`, as a contiguous slice.
    pub fn vector(&self, j: usize) -> &[Complex64] {
        &self.vectors[j * self.dim..(j + 1) * self.dim]
    }

    /// `sum_j f(lambda_j) v_j v_j†` as a raw matrix.
    pub(crate) fn assemble(&self, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
        linalg::assemble_spectral(&self.values, &self.vectors, self.dim, f)
    }
}

impl HermitianMatrix {
    /// Validates shape and Hermiticity.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let dev = linalg::hermiticity_deviation(&entries, dim);
        if dev > tol::HERMITICITY {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        Ok(Self { dim, entries })
    }

    /// Internal constructor for matrices Hermitian by construction; scrubs
    /// roundoff asymmetry instead of validating.
    pub(crate) fn from_raw_symmetrized(dim: usize, mut entries: Vec<Complex64>) -> Self {
        linalg::symmetrize(&mut entries, dim);
        Self { dim, entries }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = vec![Complex64::ZERO; n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = Complex64::new(d, 0.0);
        }
        Self { dim: n, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: linalg::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        linalg::at(&self.entries, self.dim, i, j)
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.entries, self.dim).re
    }

    /// `m + c * I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim {
            entries[i * self.dim + i] += Complex64::new(c, 0.0);
        }
        Self {
            dim: self.dim,
            entries,
        }
    }

    /// Full eigensystem, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Eigendecomposition> {
        let (values, vectors) = linalg::jacobi_hermitian(&self.entries, self.dim, true)?;
        Ok(Eigendecomposition {
            dim: self.dim,
            values,
            vectors: vectors.expect("vectors requested"),
        })
    }

    /// Eigenvalues only (ascending).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (values, _) = linalg::jacobi_hermitian(&self.entries, self.dim, false)?;
        Ok(values)
    }

    /// Spectral positive part: `sum_{lambda_i > 0} lambda_i v_i v_i†`.
    pub fn positive_part(&self) -> Result<Self> {
        let eig = self.eigh()?;
        let entries = eig.assemble(|lam| if lam > 0.0 { lam } else { 0.0 });
        Ok(Self::from_raw_symmetrized(self.dim, entries))
    }

    /// `tr(self * other)` as a real number (both factors Hermitian).
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(linalg::trace_of_product(&self.entries, &other.entries, self.dim).re)
    }
}

/// A quantum state: Hermitian, unit trace within [`tol::UNIT_TRACE`],
/// smallest eigenvalue at least [`tol::EIG_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// JSON exchange format shared by the CLI and golden tests:
/// `{"dim": d, "re": [...], "im": [...]}` with row-major coefficient arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_entries(dim: usize, entries: &[Complex64]) -> Self {
        Self {
            dim,
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }

    pub fn entries(&self) -> Result<Vec<Complex64>> {
        if self.re.len() != self.dim * self.dim || self.im.len() != self.re.len() {
            return Err(Error::BadShape {
                dim: self.dim,
                expected: self.dim * self.dim,
                got: self.re.len().min(self.im.len()),
            });
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect())
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and the eigenvalue floor.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let h = HermitianMatrix::new(dim, entries)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > tol::UNIT_TRACE {
            return Err(Error::TraceNotOne { trace: tr });
        }
        let min = h.eigenvalues()?.first().copied().unwrap_or(f64::INFINITY);
        if min < tol::EIG_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            dim,
            entries: h.entries,
        })
    }

    /// States produced by convex/spectral arithmetic on already-validated
    /// states: skips the eigenvalue check, scrubs Hermiticity roundoff.
    pub(crate) fn from_raw_trusted(dim: usize, entries: Vec<Complex64>) -> Self {
        let h = HermitianMatrix::from_raw_symmetrized(dim, entries);
        debug_assert!((h.trace() - 1.0).abs() < 1e-9);
        Self {
            dim,
            entries: h.entries,
        }
    }

    /// Pure state `|psi><psi|`; `psi` must be unit within [`tol::UNIT_VECTOR`].
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > tol::UNIT_VECTOR {
            return Err(Error::NotUnitVector {
                norm: norm_sq.sqrt(),
            });
        }
        let n = psi.len();
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { dim, entries }
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::NotNormalized { sum });
        }
        if let Some(&bad) = p.iter().find(|&&x| x < 0.0) {
            return Err(Error::NegativeWeight { value: bad });
        }
        let n = p.len();
        let mut entries = vec![Complex64::ZERO; n * n];
        for (i, &x) in p.iter().enumerate() {
            entries[i * n + i] = Complex64::new(x, 0.0);
        }
        Ok(Self { dim: n, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        linalg::at(&self.entries, self.dim, i, j)
    }

    /// View as a Hermitian matrix (cheap copy, no re-validation).
    pub fn to_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.clone(),
        }
    }

    /// `rho - sigma` as a Hermitian matrix.
    pub fn difference(&self, other: &Self) -> Result<HermitianMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(HermitianMatrix {
            dim: self.dim,
            entries: linalg::sub(&self.entries, &other.entries),
        })
    }

    /// Convex mixture `(1 - t) self + t other`, `t` in `[0, 1]`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::DomainViolation {
                what: "mixing weight",
                value: t,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Self::from_raw_trusted(self.dim, entries))
    }

    pub fn eigh(&self) -> Result<Eigendecomposition> {
        self.to_hermitian().eigh()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.to_hermitian().eigenvalues()
    }

    /// Max entrywise deviation from another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.entries, &other.entries)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_entries(self.dim, &self.entries)
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        Self::new(json.dim, json.entries()?)
    }
}

/// Which subsystem [`partial_trace`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Subsystem {
    A,
    B,
}

/// A state on `H_A (x) H_B`, A-major indexing (`index = a * dim_b + b`).
#[derive(Debug, Clone)]
pub struct BipartiteDensityMatrix {
    dim_a: usize,
    dim_b: usize,
    state: DensityMatrix,
}

impl BipartiteDensityMatrix {
    pub fn new(dim_a: usize, dim_b: usize, state: DensityMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim() {
            return Err(Error::BadFactorization {
                dim_a,
                dim_b,
                dim: state.dim(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            state,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// Trace distance `1/2 ||rho - sigma||_1`, in `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = rho.difference(sigma)?;
    let vals = diff.eigenvalues()?;
    Ok(0.5 * vals.iter().map(|x| x.abs()).sum::<f64>())
}

/// Partial trace of a bipartite state, keeping the requested subsystem.
pub fn partial_trace(omega: &BipartiteDensityMatrix, keep: Subsystem) -> DensityMatrix {
    let (da, db) = (omega.dim_a, omega.dim_b);
    let full = omega.state.entries();
    let n = da * db;
    match keep {
        Subsystem::A => {
            let mut out = vec![Complex64::ZERO; da * da];
            for a in 0..da {
                for a2 in 0..da {
                    let mut s = Complex64::ZERO;
                    for b in 0..db {
                        s += full[(a * db + b) * n + (a2 * db + b)];
                    }
                    out[a * da + a2] = s;
                }
            }
            DensityMatrix::from_raw_trusted(da, out)
        }
        Subsystem::B => {
            let mut out = vec![Complex64::ZERO; db * db];
            for b in 0..db {
                for b2 in 0..db {
                    let mut s = Complex64::ZERO;
                    for a in 0..da {
                        s += full[(a * db + b) * n + (a * db + b2)];
                    }
                    out[b * db + b2] = s;
                }
            }
            DensityMatrix::from_raw_trusted(db, out)
        }
    }
}

/// Random state of the given rank: normalized Gram matrix of a
/// `dim x rank` complex Gaussian draw. Deterministic per seed.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut r = rng::seeded(seed);
    random_density_rng(&mut r, dim, rank)
}

/// As [`random_density`], drawing from a caller-supplied generator.
pub fn random_density_rng<R: Rng>(rng_: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::DomainViolation {
            what: "rank",
            value: rank as f64,
        });
    }
    // G: dim x rank, rho = G G† / tr(G G†)
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| rng::complex_gaussian(rng_))
        .collect();
    let mut entries = vec![Complex64::ZERO; dim * dim];
    let mut tr = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut s = Complex64::ZERO;
            for k in 0..rank {
                s += g[i * rank + k] * g[j * rank + k].conj();
            }
            entries[i * dim + j] = s;
            if i == j {
                tr += s.re;
            }
        }
    }
    for z in &mut entries {
        *z /= tr;
    }
    Ok(DensityMatrix::from_raw_trusted(dim, entries))
}

/// Random unit vector (Haar via normalized Gaussian).
pub fn random_unit_vector_rng<R: Rng>(rng_: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| rng::complex_gaussian(rng_)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

const PERTURBATION_ATTEMPTS: u32 = 64;

/// A state at trace distance in `[0.9 * eps_target, eps_target]` from `rho`,
/// found by mixing toward a random direction with bisection on the mixing
/// weight. Retries with a fresh direction when the target is unreachable;
/// fails after 64 attempts. Deterministic per seed.
pub fn random_perturbation(
    rho: &DensityMatrix,
    eps_target: f64,
    seed: u64,
) -> Result<DensityMatrix> {
    let mut r = rng::seeded(seed);
    random_perturbation_rng(&mut r, rho, eps_target)
}

/// As [`random_perturbation`], drawing from a caller-supplied generator.
pub fn random_perturbation_rng<R: Rng>(
    rng_: &mut R,
    rho: &DensityMatrix,
    eps_target: f64,
) -> Result<DensityMatrix> {
    if !(eps_target > 0.0 && eps_target <= 1.0) {
        return Err(Error::DomainViolation {
            what: "eps_target",
            value: eps_target,
        });
    }
    let band = 0.9 * eps_target..=eps_target;
    for _ in 0..PERTURBATION_ATTEMPTS {
        let tau = random_density_rng(rng_, rho.dim(), rho.dim())?;
        let reach = trace_distance(rho, &tau)?;
        if reach < 0.95 * eps_target {
            continue; // direction cannot reach the middle of the band
        }
        // trace_distance(rho, mix(t)) grows monotonically from 0 to `reach`.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let sigma = rho.mix(&tau, mid)?;
            let d = trace_distance(rho, &sigma)?;
            if band.contains(&d) {
                return Ok(sigma);
            }
            if d < 0.95 * eps_target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Err(Error::PerturbationFailed {
        attempts: PERTURBATION_ATTEMPTS,
    })
}
