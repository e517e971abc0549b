//! Entanglement of formation.
//!
//! For a pure bipartite state the value is exact: the entropy of the reduced
//! state on `A`. For mixed states the discrete EoF is an infimum over
//! pure-state ensembles; [`eof_upper`] produces certified *upper* bounds by
//! optimizing over all size-`m` ensembles, which are parametrized by
//! isometries mixing a fixed square-root decomposition of the state
//! (Schrodinger mixture theorem). The optimizer is derivative-free: row-pair
//! rotations with a line search, restarted from random isometries.
//!
//! [`eof_two_qubit_oracle`] is an independent check for `2 x 2` systems via
//! the closed-form concurrence; it never feeds the optimizer.
//!
//! The bound formulas live at the end: with `delta = sqrt(eps (2 - eps))`,
//!
//! ```text
//! rank form:   delta * ln(rank rho_A) + h2_tilde(delta)
//! energy form: delta * F_H(E / delta) + h2_tilde(delta)
//! ```

use num_complex::Complex64;
use rand::Rng;

use crate::entropy::{h2_tilde, h2_unit, shannon_entropy};
use crate::gibbs::HamiltonianSpectrum;
use crate::linalg;
use crate::operator::BipartiteDensityMatrix;
use crate::{rng, tol, Error, Result};

/// A pure-state ensemble `{p_k, |w_k>}` for a bipartite state.
#[derive(Debug, Clone)]
pub struct EnsembleDecomposition {
    weights: Vec<f64>,
    states: Vec<Vec<Complex64>>,
    dim_a: usize,
    dim_b: usize,
}

impl EnsembleDecomposition {
    /// Validates normalization of the members and reconstruction of the
    /// target state within [`tol::ENSEMBLE_RECONSTRUCTION`].
    pub fn new(
        weights: Vec<f64>,
        states: Vec<Vec<Complex64>>,
        target: &BipartiteDensityMatrix,
    ) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::SizeMismatch {
                left: weights.len(),
                right: states.len(),
            });
        }
        let d = target.state().dim();
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        let mut rebuilt = vec![Complex64::ZERO; d * d];
        for (p, psi) in weights.iter().zip(&states) {
            if psi.len() != d {
                return Err(Error::DimensionMismatch {
                    left: psi.len(),
                    right: d,
                });
            }
            let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if (norm_sq.sqrt() - 1.0).abs() > 1e-9 {
                return Err(Error::NotUnitVector {
                    norm: norm_sq.sqrt(),
                });
            }
            for i in 0..d {
                for j in 0..d {
                    rebuilt[i * d + j] += p * psi[i] * psi[j].conj();
                }
            }
        }
        let dev = linalg::max_abs_diff(&rebuilt, target.state().entries());
        if dev > tol::ENSEMBLE_RECONSTRUCTION {
            return Err(Error::ConvergenceFailure {
                what: format!("ensemble reconstructs target only to {dev:e}"),
            });
        }
        Ok(Self {
            weights,
            states,
            dim_a: target.dim_a(),
            dim_b: target.dim_b(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn state(&self, k: usize) -> &[Complex64] {
        &self.states[k]
    }

    /// Average marginal entropy `sum_k p_k S([w_k]_A)` of this ensemble.
    pub fn average_marginal_entropy(&self) -> Result<f64> {
        let mut total = 0.0;
        for (p, psi) in self.weights.iter().zip(&self.states) {
            total += p * eof_pure(psi, self.dim_a, self.dim_b)?;
        }
        Ok(total)
    }
}

/// Reduced state on `A` of `|psi><psi|`, unnormalized
/// (`trace = ||psi||^2`), A-major indexing.
fn reduced_a(psi: &[Complex64], da: usize, db: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; da * da];
    for a in 0..da {
        for a2 in 0..=a {
            let mut s = Complex64::ZERO;
            for b in 0..db {
                s += psi[a * db + b] * psi[a2 * db + b].conj();
            }
            out[a * da + a2] = s;
            out[a2 * da + a] = s.conj();
        }
    }
    out
}

/// `p * S(rho_A / p)` for the unnormalized reduced state of `w`, where
/// `p = ||w||^2`; returns 0 for negligible weight.
fn marginal_entropy_term(w: &[Complex64], da: usize, db: usize) -> f64 {
    let p: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    if p < 1e-15 {
        return 0.0;
    }
    if da == 2 {
        // closed-form eigenvalues of the 2x2 reduced state
        let mut r00 = 0.0;
        let mut r11 = 0.0;
        let mut r01 = Complex64::ZERO;
        for b in 0..db {
            let x = w[b];
            let y = w[db + b];
            r00 += x.norm_sqr();
            r11 += y.norm_sqr();
            r01 += x * y.conj();
        }
        let half_tr = 0.5 * (r00 + r11);
        let disc = (0.25 * (r00 - r11) * (r00 - r11) + r01.norm_sqr()).sqrt();
        let lam1 = ((half_tr + disc) / p).clamp(0.0, 1.0);
        let lam2 = ((half_tr - disc) / p).max(0.0);
        let mut s = 0.0;
        if lam1 > 0.0 {
            s -= lam1 * lam1.ln();
        }
        if lam2 > 0.0 {
            s -= lam2 * lam2.ln();
        }
        return p * s.max(0.0);
    }
    let red = reduced_a(w, da, db);
    let (vals, _) = linalg::jacobi_hermitian(&red, da, false).expect("small Hermitian eigh");
    let probs: Vec<f64> = vals.iter().map(|v| (v / p).max(0.0)).collect();
    p * shannon_entropy(&probs).unwrap_or(0.0)
}

/// EoF of a pure state: `S([psi]_A)`, in `[0, ln min(dA, dB)]`.
pub fn eof_pure(psi: &[Complex64], dim_a: usize, dim_b: usize) -> Result<f64> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::BadFactorization {
            dim_a,
            dim_b,
            dim: psi.len(),
        });
    }
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq.sqrt() - 1.0).abs() > tol::UNIT_VECTOR {
        return Err(Error::NotUnitVector {
            norm: norm_sq.sqrt(),
        });
    }
    Ok(marginal_entropy_term(psi, dim_a, dim_b))
}

/// Numerical rank of an eigenvalue list against [`tol::NUMERICAL_RANK`],
/// plus a flag for eigenvalues within 10x of the threshold (the rank
/// decision is then fragile).
pub fn numerical_rank(eigenvalues: &[f64]) -> (usize, bool) {
    let rank = eigenvalues
        .iter()
        .filter(|&&x| x > tol::NUMERICAL_RANK)
        .count();
    let fragile = eigenvalues
        .iter()
        .any(|&x| x > tol::NUMERICAL_RANK / 10.0 && x < tol::NUMERICAL_RANK * 10.0);
    (rank, fragile)
}

/// Result of the ensemble-optimization upper bound.
#[derive(Debug, Clone)]
pub struct EofUpper {
    /// `sum_k p_k S([w_k]_A)` of the best ensemble found; an upper bound on
    /// the discrete EoF by construction.
    pub value: f64,
    pub ensemble: EnsembleDecomposition,
    /// Numerical rank of the input state.
    pub rank: usize,
    /// True when an eigenvalue sat within 10x of the rank threshold.
    pub rank_near_threshold: bool,
}

const EOF_PHASES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    3.0 * std::f64::consts::FRAC_PI_4,
];
const EOF_MAX_SWEEPS: usize = 80;

struct EofObjective {
    da: usize,
    db: usize,
    /// Row k is the subnormalized member `sqrt(p_k) |w_k>`.
    rows: Vec<Vec<Complex64>>,
    terms: Vec<f64>,
}

impl EofObjective {
    fn new(rows: Vec<Vec<Complex64>>, da: usize, db: usize) -> Self {
        let terms = rows
            .iter()
            .map(|w| marginal_entropy_term(w, da, db))
            .collect();
        Self {
            da,
            db,
            rows,
            terms,
        }
    }

    fn total(&self) -> f64 {
        self.terms.iter().sum()
    }

    /// Objective contribution of rows (k, l) after a rotation by
    /// `(theta, phi)`, without committing it.
    fn pair_value(&self, k: usize, l: usize, theta: f64, phi: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        let d = self.da * self.db;
        let mut wk = vec![Complex64::ZERO; d];
        let mut wl = vec![Complex64::ZERO; d];
        for i in 0..d {
            let a = self.rows[k][i];
            let b = self.rows[l][i];
            wk[i] = c * a + s * e * b;
            wl[i] = -s * e.conj() * a + c * b;
        }
        marginal_entropy_term(&wk, self.da, self.db) + marginal_entropy_term(&wl, self.da, self.db)
    }

    fn apply(&mut self, k: usize, l: usize, theta: f64, phi: f64) {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        let d = self.da * self.db;
        for i in 0..d {
            let a = self.rows[k][i];
            let b = self.rows[l][i];
            self.rows[k][i] = c * a + s * e * b;
            self.rows[l][i] = -s * e.conj() * a + c * b;
        }
        self.terms[k] = marginal_entropy_term(&self.rows[k], self.da, self.db);
        self.terms[l] = marginal_entropy_term(&self.rows[l], self.da, self.db);
    }

    /// One full sweep of pairwise rotations; returns the improvement.
    fn sweep(&mut self) -> f64 {
        let m = self.rows.len();
        let before = self.total();
        for k in 0..m {
            for l in (k + 1)..m {
                let base = self.terms[k] + self.terms[l];
                let mut best = (0.0, 0.0, base);
                for &phi in &EOF_PHASES {
                    // coarse grid over the rotation angle
                    let mut local = (0.0f64, base);
                    for step in 1..12 {
                        let theta = -std::f64::consts::FRAC_PI_2
                            + std::f64::consts::PI * step as f64 / 12.0;
                        let v = self.pair_value(k, l, theta, phi);
                        if v < local.1 {
                            local = (theta, v);
                        }
                    }
                    // golden-section refinement around the best grid point
                    let span = std::f64::consts::PI / 12.0;
                    let (mut a, mut b) = (local.0 - span, local.0 + span);
                    const INV_PHI: f64 = 0.6180339887498949;
                    for _ in 0..20 {
                        let x1 = b - INV_PHI * (b - a);
                        let x2 = a + INV_PHI * (b - a);
                        let f1 = self.pair_value(k, l, x1, phi);
                        let f2 = self.pair_value(k, l, x2, phi);
                        if f1 < local.1 {
                            local = (x1, f1);
                        }
                        if f2 < local.1 {
                            local = (x2, f2);
                        }
                        if f1 > f2 {
                            a = x1;
                        } else {
                            b = x2;
                        }
                    }
                    if local.1 < best.2 {
                        best = (local.0, phi, local.1);
                    }
                }
                if best.2 < base - 1e-14 {
                    self.apply(k, l, best.0, best.1);
                }
            }
        }
        before - self.total()
    }
}

/// Random `m x r` isometry (orthonormal columns) via Gram-Schmidt on a
/// Gaussian draw.
fn random_isometry<R: Rng>(rng_: &mut R, m: usize, r: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..r)
        .map(|_| (0..m).map(|_| rng::complex_gaussian(rng_)).collect())
        .collect();
    for j in 0..r {
        for i in 0..j {
            let proj: Complex64 = (0..m).map(|t| cols[i][t].conj() * cols[j][t]).sum();
            let prev: Vec<Complex64> = cols[i].clone();
            for (t, z) in cols[j].iter_mut().enumerate() {
                *z -= proj * prev[t];
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    cols
}

/// Upper bound on the discrete EoF via size-`m` ensemble optimization.
///
/// Any size-`m` pure-state ensemble of `rho` is `W = U V` with `V` the
/// square-root decomposition (rows `sqrt(lambda_i) e_i`) and `U` an
/// `m x rank` isometry; row-pair rotations explore the full isometry family.
/// Best-of over `restarts` independent starts (restart 0 is the square-root
/// decomposition itself), deterministic per seed and monotone in `restarts`.
pub fn eof_upper(
    rho: &BipartiteDensityMatrix,
    m: usize,
    restarts: usize,
    seed: u64,
) -> Result<EofUpper> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let d = da * db;
    let eig = rho.state().eigh()?;
    let (rank, rank_near_threshold) = numerical_rank(&eig.values);
    if m < rank.max(1) {
        return Err(Error::InfeasibleEnsembleSize { m, rank });
    }
    if restarts == 0 {
        return Err(Error::DomainViolation {
            what: "restarts",
            value: 0.0,
        });
    }
    // square-root decomposition: rows sqrt(lambda_i) e_i, largest first
    let root: Vec<Vec<Complex64>> = (0..d)
        .rev()
        .filter(|&j| eig.values[j] > tol::NUMERICAL_RANK)
        .map(|j| {
            let lam = eig.values[j].sqrt();
            eig.vector(j).iter().map(|z| lam * z).collect()
        })
        .collect();
    let r = root.len().max(1);

    let mut best: Option<EofObjective> = None;
    for restart in 0..restarts {
        let rows: Vec<Vec<Complex64>> = if restart == 0 {
            let mut rows = root.clone();
            rows.resize(m, vec![Complex64::ZERO; d]);
            rows
        } else {
            let mut rng_ = rng::trial(seed, restart as u64);
            let u = random_isometry(&mut rng_, m, r);
            (0..m)
                .map(|k| {
                    let mut w = vec![Complex64::ZERO; d];
                    for (i, root_row) in root.iter().enumerate() {
                        let coeff = u[i][k];
                        for (t, z) in root_row.iter().enumerate() {
                            w[t] += coeff * z;
                        }
                    }
                    w
                })
                .collect()
        };
        let mut obj = EofObjective::new(rows, da, db);
        for _ in 0..EOF_MAX_SWEEPS {
            if obj.sweep() < 1e-10 {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| obj.total() < b.total()) {
            best = Some(obj);
        }
    }
    let best = best.expect("restarts >= 1");

    let mut weights = Vec::new();
    let mut states = Vec::new();
    for w in &best.rows {
        let p: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if p < 1e-12 {
            continue;
        }
        let inv = 1.0 / p.sqrt();
        weights.push(p);
        states.push(w.iter().map(|z| inv * z).collect());
    }
    let ensemble = EnsembleDecomposition::new(weights, states, rho)?;
    let value = ensemble.average_marginal_entropy()?;
    Ok(EofUpper {
        value,
        ensemble,
        rank,
        rank_near_threshold,
    })
}

/// Exact two-qubit EoF from the closed-form concurrence: an independent
/// oracle for tests and validity campaigns, not used by the optimizer.
pub fn eof_two_qubit_oracle(rho: &BipartiteDensityMatrix) -> Result<f64> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::BadFactorization {
            dim_a: rho.dim_a(),
            dim_b: rho.dim_b(),
            dim: rho.state().dim(),
        });
    }
    let n = 4;
    let entries = rho.state().entries();
    // (sigma_y (x) sigma_y), real antidiagonal (-1, 1, 1, -1)
    let mut yy = vec![Complex64::ZERO; n * n];
    yy[3] = Complex64::new(-1.0, 0.0);
    yy[n + 2] = Complex64::new(1.0, 0.0);
    yy[2 * n + 1] = Complex64::new(1.0, 0.0);
    yy[3 * n] = Complex64::new(-1.0, 0.0);

    let conj: Vec<Complex64> = entries.iter().map(|z| z.conj()).collect();
    let spin_flipped = linalg::matmul(&yy, &linalg::matmul(&conj, &yy, n), n);

    // eigenvalues of rho * rho_tilde via the Hermitian sqrt(rho) rho_tilde sqrt(rho)
    let eig = rho.state().eigh()?;
    let sqrt_rho = eig.assemble(|lam| if lam > 0.0 { lam.sqrt() } else { 0.0 });
    let mut mid = linalg::matmul(&sqrt_rho, &linalg::matmul(&spin_flipped, &sqrt_rho, n), n);
    linalg::symmetrize(&mut mid, n);
    let (vals, _) = linalg::jacobi_hermitian(&mid, n, false)?;
    // The sqrt amplifies roundoff near 0 (1e-17 -> 3e-9); cut eigenvalues
    // below the noise floor of the matrix products first.
    let cut = 1e-14 * vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut lams: Vec<f64> = vals
        .iter()
        .map(|&v| if v > cut { v.sqrt() } else { 0.0 })
        .collect();
    lams.sort_by(|a, b| b.total_cmp(a));
    let c = (lams[0] - lams[1] - lams[2] - lams[3]).clamp(0.0, 1.0);
    Ok(h2_unit(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

/// `delta = sqrt(eps (2 - eps))`: the trace-distance level after purifying
/// an `eps`-perturbation; monotone from 0 to 1 on `[0, 1]`, always `>= eps`.
pub fn delta_from_eps(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    Ok((eps * (2.0 - eps)).sqrt())
}

/// Rank-constrained EoF bound `delta ln(rank_a) + h2_tilde(delta)`.
pub fn eof_bound_rank(rank_a: usize, eps: f64) -> Result<f64> {
    if rank_a == 0 {
        return Err(Error::DomainViolation {
            what: "rank_a",
            value: 0.0,
        });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let delta = delta_from_eps(eps)?;
    Ok(delta * (rank_a as f64).ln() + h2_tilde(delta)?)
}

/// Energy-constrained EoF bound `delta F_H(E / delta) + h2_tilde(delta)`,
/// for states with `tr H rho_A <= E` and `H` on subsystem `A`.
pub fn eof_bound_energy(spec: &HamiltonianSpectrum, energy: f64, eps: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    let delta = delta_from_eps(eps)?;
    Ok(delta * spec.f_h(energy / delta)? + h2_tilde(delta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h2;
    use crate::operator::{random_density, random_perturbation, DensityMatrix};
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bipartite(dim_a: usize, dim_b: usize, rho: DensityMatrix) -> BipartiteDensityMatrix {
        BipartiteDensityMatrix::new(dim_a, dim_b, rho).unwrap()
    }

    fn random_two_qubit(rank: usize, seed: u64) -> BipartiteDensityMatrix {
        bipartite(2, 2, random_density(4, rank, seed).unwrap())
    }

    fn bell_vector() -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]
    }

    #[test]
    fn eof_pure_examples() {
        let product = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(eof_pure(&product, 2, 2).unwrap() < 1e-12);

        assert!((eof_pure(&bell_vector(), 2, 2).unwrap() - LN_2).abs() < 1e-12);

        let skew = [
            c(0.75f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.25f64.sqrt(), 0.0),
        ];
        assert!((eof_pure(&skew, 2, 2).unwrap() - h2(0.25).unwrap()).abs() < 1e-12);

        let unnormalized = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(eof_pure(&unnormalized, 2, 2).is_err());
    }

    #[test]
    fn oracle_on_bell_and_separable_states() {
        let bell = bipartite(2, 2, DensityMatrix::pure(&bell_vector()).unwrap());
        assert!((eof_two_qubit_oracle(&bell).unwrap() - LN_2).abs() < 1e-10);

        let sep = bipartite(
            2,
            2,
            DensityMatrix::from_probabilities(&[0.4, 0.1, 0.3, 0.2]).unwrap(),
        );
        assert!(eof_two_qubit_oracle(&sep).unwrap() < 1e-10);
    }

    #[test]
    fn oracle_matches_pure_state_value() {
        for seed in 0..40u64 {
            let mut r = crate::rng::seeded(300 + seed);
            let psi = crate::operator::random_unit_vector_rng(&mut r, 4);
            let rho = bipartite(2, 2, DensityMatrix::pure(&psi).unwrap());
            let oracle = eof_two_qubit_oracle(&rho).unwrap();
            let exact = eof_pure(&psi, 2, 2).unwrap();
            assert!(
                (oracle - exact).abs() < 1e-10,
                "seed {seed}: oracle {oracle} vs pure {exact}"
            );
        }
    }

    #[test]
    fn oracle_werner_zero_boundary() {
        // p Bell + (1-p) I/4 is separable exactly up to p = 1/3
        let bell = DensityMatrix::pure(&bell_vector()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        let at_boundary = bipartite(2, 2, mixed.mix(&bell, 1.0 / 3.0).unwrap());
        let val = eof_two_qubit_oracle(&at_boundary).unwrap();
        assert!(val < 1e-9, "boundary Werner state has EoF {val}");

        let above = bipartite(2, 2, mixed.mix(&bell, 0.5).unwrap());
        assert!(eof_two_qubit_oracle(&above).unwrap() > 1e-3);

        let upper = eof_upper(&at_boundary, 4, 8, 7).unwrap();
        assert!(
            upper.value < 1e-3,
            "eof_upper at boundary = {}",
            upper.value
        );
    }

    #[test]
    fn eof_upper_pure_state_is_exact() {
        let psi = bell_vector();
        let rho = bipartite(2, 2, DensityMatrix::pure(&psi).unwrap());
        let up = eof_upper(&rho, 1, 1, 1).unwrap();
        assert_eq!(up.rank, 1);
        assert!((up.value - LN_2).abs() < 1e-9);
    }

    #[test]
    fn eof_upper_separable_mixture_vanishes() {
        // 1/2(|00><00| + |11><11|) admits a product ensemble
        let rho = bipartite(
            2,
            2,
            DensityMatrix::from_probabilities(&[0.5, 0.0, 0.0, 0.5]).unwrap(),
        );
        let up = eof_upper(&rho, 4, 8, 3).unwrap();
        assert!(up.value < 1e-6, "value {}", up.value);
    }

    #[test]
    fn eof_upper_infeasible_size() {
        let rho = random_two_qubit(3, 21);
        assert!(matches!(
            eof_upper(&rho, 2, 4, 1),
            Err(Error::InfeasibleEnsembleSize { .. })
        ));
    }

    #[test]
    fn eof_upper_dominates_oracle_and_tracks_it() {
        let mut close = 0;
        for seed in 0..30u64 {
            let rank = (seed % 4 + 1) as usize;
            let rho = random_two_qubit(rank, 400 + seed);
            let oracle = eof_two_qubit_oracle(&rho).unwrap();
            let up = eof_upper(&rho, 4, 16, seed).unwrap();
            assert!(
                up.value >= oracle - 1e-6,
                "upper bound {} below oracle {}",
                up.value,
                oracle
            );
            if up.value - oracle < 1e-3 {
                close += 1;
            }
        }
        assert!(
            close >= 27,
            "only {close}/30 runs within 1e-3 of the oracle"
        );
    }

    #[test]
    fn eof_upper_monotone_in_restarts() {
        let rho = random_two_qubit(4, 1234);
        let mut prev = f64::INFINITY;
        for restarts in [1, 2, 4, 8, 16] {
            let up = eof_upper(&rho, 4, restarts, 99).unwrap();
            assert!(up.value <= prev + 1e-12);
            prev = up.value;
        }
    }

    #[test]
    fn eof_upper_is_deterministic() {
        let rho = random_two_qubit(3, 555);
        let a = eof_upper(&rho, 4, 6, 42).unwrap();
        let b = eof_upper(&rho, 4, 6, 42).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_from_eps(0.0).unwrap(), 0.0);
        assert_eq!(delta_from_eps(1.0).unwrap(), 1.0);
        assert!((delta_from_eps(0.5).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(delta_from_eps(1.1).is_err());
        // delta >= eps on a grid
        for k in 0..=100 {
            let eps = k as f64 / 100.0;
            assert!(delta_from_eps(eps).unwrap() >= eps);
        }
    }

    #[test]
    fn eof_bound_rank_examples() {
        assert_eq!(eof_bound_rank(2, 0.0).unwrap(), 0.0);

        let delta = delta_from_eps(0.1).unwrap();
        let expect = h2_tilde(delta).unwrap();
        assert!((eof_bound_rank(1, 0.1).unwrap() - expect).abs() < 1e-14);

        let expect = delta * LN_2 + h2_tilde(delta).unwrap();
        let got = eof_bound_rank(2, 0.1).unwrap();
        assert!((got - expect).abs() < 1e-14);
        assert!((got - 0.9870488838232715).abs() < 1e-4, "got {got}");
    }

    #[test]
    fn eof_bound_energy_examples() {
        let spec = HamiltonianSpectrum::linear(1.0, 512).unwrap();
        // eps = 1 (delta = 1): F_H(E) + ln 2
        let e = 1.0;
        let expect = spec.f_h(e).unwrap() + LN_2;
        assert!((eof_bound_energy(&spec, e, 1.0).unwrap() - expect).abs() < 1e-12);

        // eps = 0.1: delta ((E'+1)ln(E'+1) - E' ln E') + h2(delta), E' = E/delta
        let delta = delta_from_eps(0.1).unwrap();
        let ep = e / delta;
        let fh = (ep + 1.0) * (ep + 1.0).ln() - ep * ep.ln();
        let expect = delta * fh + h2(delta).unwrap();
        let got = eof_bound_energy(&spec, e, 0.1).unwrap();
        assert!((got - expect).abs() < 1e-6, "got {got}, expect {expect}");
        assert!((got - 1.5663).abs() < 1e-3, "got {got}");

        // two-level spectrum routed through the solver
        let two = HamiltonianSpectrum::from_levels(vec![0.0, 1.0]).unwrap();
        let eps = 0.15;
        let delta = delta_from_eps(eps).unwrap();
        assert!(0.25 / delta < 0.5);
        let fh = two.f_h(0.25 / delta).unwrap();
        let expect = delta * fh + h2_tilde(delta).unwrap();
        assert!((eof_bound_energy(&two, 0.25, eps).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn rank_bound_validity_with_exact_values() {
        // oracle(rho) - oracle(sigma) <= bound(rank_A, measured eps)
        for seed in 0..60u64 {
            let rank = (seed % 2 + 1) as usize;
            let rho = random_two_qubit(rank, 800 + seed);
            let eps_target = 0.02 + 0.015 * (seed % 20) as f64;
            let sigma_state = random_perturbation(rho.state(), eps_target, 900 + seed).unwrap();
            let sigma = bipartite(2, 2, sigma_state);
            let measured = crate::operator::trace_distance(rho.state(), sigma.state()).unwrap();
            let lhs = eof_two_qubit_oracle(&rho).unwrap() - eof_two_qubit_oracle(&sigma).unwrap();
            let rank_a = {
                let red = crate::operator::partial_trace(&rho, crate::operator::Subsystem::A);
                numerical_rank(&red.eigenvalues().unwrap()).0
            };
            let bound = eof_bound_rank(rank_a, measured).unwrap();
            assert!(
                lhs <= bound + 1e-9,
                "seed {seed}: lhs {lhs} > bound {bound} at eps {measured}"
            );
        }
    }

    #[test]
    fn oracle_satisfies_h2_moduli() {
        // LAA inequalities with a = b = h2 for the exact two-qubit EoF
        let mut r = crate::rng::seeded(91);
        for _ in 0..300 {
            let rank1 = (r.random::<u32>() % 4 + 1) as usize;
            let rank2 = (r.random::<u32>() % 4 + 1) as usize;
            let s1 = r.random::<u64>();
            let s2 = r.random::<u64>();
            let p: f64 = r.random();
            let rho = random_two_qubit(rank1, s1);
            let sigma = random_two_qubit(rank2, s2);
            let mixed = bipartite(2, 2, rho.state().mix(sigma.state(), 1.0 - p).unwrap());
            let fr = eof_two_qubit_oracle(&rho).unwrap();
            let fs = eof_two_qubit_oracle(&sigma).unwrap();
            let fm = eof_two_qubit_oracle(&mixed).unwrap();
            let expected = p * fr + (1.0 - p) * fs;
            let h = h2_unit(p);
            assert!(expected - h - fm <= 1e-9, "concavity modulus violated");
            assert!(fm - expected - h <= 1e-9, "convexity modulus violated");
        }
    }

    use rand::Rng;
}
