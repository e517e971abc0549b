//! Discrete measure spaces with state-valued kernels.
//!
//! A [`DiscreteEnsemble`] is a finite point set `X` together with a map
//! `x -> omega(x)` into density matrices. A probability measure `mu` on `X`
//! *represents* the state `rho = sum_x mu(x) omega(x)` (its barycenter).
//! For two represented states the signed measure `mu_rho - mu_sigma` splits
//! into Jordan parts of equal mass `eps = TV(mu_rho, mu_sigma)`, giving the
//! decomposition
//!
//! ```text
//! rho = eps tau_+ + (1 - eps) omega_*,
//! sigma = eps tau_- + (1 - eps) omega_*,
//! ```
//!
//! with `tau_± = barycenter(eps^{-1} [mu_rho - mu_sigma]_±)` and
//! `omega_* = barycenter((mu_rho - eps nu_+) / (1 - eps))`. Feeding these
//! into the almost-affinity inequalities of an [`LaaFunction`] yields the
//! generic semicontinuity bound
//! `f(rho) - f(sigma) <= eps C_f + a_f(eps) + b_f(eps)` ([`generic_bound`]).
//!
//! Everything here is exactly computable: the sigma-algebra is the power set
//! of a finite `X`, integrals are finite sums.

use serde::{Deserialize, Serialize};

use crate::entropy::{h2_unit, von_neumann_entropy};
use crate::operator::{DensityMatrix, HermitianMatrix, MatrixJson};
use crate::{rng, tol, Error, Result};

use rand::Rng;

/// Nonnegative weights over the ensemble's point set, summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityMeasure {
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::NegativeWeight { value: bad });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { weights })
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub(crate) fn random<R: Rng>(rng_: &mut R, n: usize) -> Self {
        Self {
            weights: rng::dirichlet(rng_, n),
        }
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

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }
}

/// Total variation distance `1/2 sum |mu - nu|` between measures on the
/// same point set.
pub fn tv(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::SizeMismatch {
            left: mu.len(),
            right: nu.len(),
        });
    }
    Ok(0.5
        * mu.weights
            .iter()
            .zip(&nu.weights)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Finite point set with a density-matrix-valued kernel of common dimension.
#[derive(Debug, Clone)]
pub struct DiscreteEnsemble {
    points: Vec<String>,
    kernel: Vec<DensityMatrix>,
    dim: usize,
}

/// JSON exchange format:
/// `{"points": [...], "kernel": [matrix, ...]}` with matrices in the
/// `{dim, re, im}` layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub points: Vec<String>,
    pub kernel: Vec<MatrixJson>,
}

impl DiscreteEnsemble {
    pub fn new(points: Vec<String>, kernel: Vec<DensityMatrix>) -> Result<Self> {
        if kernel.is_empty() || points.len() != kernel.len() {
            return Err(Error::SizeMismatch {
                left: points.len(),
                right: kernel.len(),
            });
        }
        let dim = kernel[0].dim();
        if let Some(bad) = kernel.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self {
            points,
            kernel,
            dim,
        })
    }

    /// Auto-labels the points `x0, x1, ...`.
    pub fn from_kernel(kernel: Vec<DensityMatrix>) -> Result<Self> {
        let points = (0..kernel.len()).map(|i| format!("x{i}")).collect();
        Self::new(points, kernel)
    }

    pub fn len(&self) -> usize {
        self.kernel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn kernel(&self) -> &[DensityMatrix] {
        &self.kernel
    }

    pub fn to_json(&self) -> EnsembleJson {
        EnsembleJson {
            points: self.points.clone(),
            kernel: self.kernel.iter().map(|k| k.to_json()).collect(),
        }
    }

    pub fn from_json(json: &EnsembleJson) -> Result<Self> {
        let kernel = json
            .kernel
            .iter()
            .map(DensityMatrix::from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.points.clone(), kernel)
    }
}

/// Barycenter `sum_x mu(x) omega(x)` of a measure under the kernel.
pub fn barycenter(ens: &DiscreteEnsemble, mu: &ProbabilityMeasure) -> Result<DensityMatrix> {
    if mu.len() != ens.len() {
        return Err(Error::SizeMismatch {
            left: mu.len(),
            right: ens.len(),
        });
    }
    let d = ens.dim();
    let mut entries = vec![num_complex::Complex64::ZERO; d * d];
    for (w, state) in mu.weights.iter().zip(ens.kernel()) {
        if *w == 0.0 {
            continue;
        }
        for (out, z) in entries.iter_mut().zip(state.entries()) {
            *out += w * z;
        }
    }
    DensityMatrix::new(d, entries)
}

/// Jordan decomposition of the signed measure `mu - nu`.
#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    /// `[mu - nu]_+`, pointwise `max(mu - nu, 0)`.
    pub plus: Vec<f64>,
    /// `[mu - nu]_-`, pointwise `max(nu - mu, 0)`.
    pub minus: Vec<f64>,
    /// Common total mass of both parts, `= TV(mu, nu)`.
    pub epsilon: f64,
}

/// Split `mu - nu` into its mutually singular positive and negative parts.
/// Both parts carry mass exactly `TV(mu, nu)` and are dominated by `mu` and
/// `nu` respectively.
pub fn jordan_decompose(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
) -> Result<JordanDecomposition> {
    if mu.len() != nu.len() {
        return Err(Error::SizeMismatch {
            left: mu.len(),
            right: nu.len(),
        });
    }
    let plus: Vec<f64> = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(a, b)| (a - b).max(0.0))
        .collect();
    let minus: Vec<f64> = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(a, b)| (b - a).max(0.0))
        .collect();
    let plus_mass: f64 = plus.iter().sum();
    let minus_mass: f64 = minus.iter().sum();
    Ok(JordanDecomposition {
        plus,
        minus,
        epsilon: 0.5 * (plus_mass + minus_mass),
    })
}

/// The decomposition behind the generic bound: `tau_±` and the common part
/// `omega_*` with reconstruction identities
/// `rho = eps tau_+ + (1-eps) omega_*`, `sigma = eps tau_- + (1-eps) omega_*`.
#[derive(Debug, Clone)]
pub struct StatePairDecomposition {
    pub epsilon: f64,
    pub nu_plus: ProbabilityMeasure,
    pub nu_minus: ProbabilityMeasure,
    /// Absent when `eps = 1` (disjoint representing measures).
    pub mu_star: Option<ProbabilityMeasure>,
    pub tau_plus: DensityMatrix,
    pub tau_minus: DensityMatrix,
    /// Absent when `eps = 1`.
    pub omega_star: Option<DensityMatrix>,
}

/// Decompose a pair of represented states along `mu_rho - mu_sigma`.
///
/// Fails with [`Error::DegenerateDecomposition`] when the measures coincide
/// (`eps = 0`); at `eps = 1` the common part is absent and the identities
/// reduce to `rho = tau_+`, `sigma = tau_-`.
pub fn decompose_state_pair(
    ens: &DiscreteEnsemble,
    mu_rho: &ProbabilityMeasure,
    mu_sigma: &ProbabilityMeasure,
) -> Result<StatePairDecomposition> {
    if mu_rho.len() != ens.len() || mu_sigma.len() != ens.len() {
        return Err(Error::SizeMismatch {
            left: mu_rho.len().max(mu_sigma.len()),
            right: ens.len(),
        });
    }
    let jd = jordan_decompose(mu_rho, mu_sigma)?;
    if jd.epsilon == 0.0 {
        return Err(Error::DegenerateDecomposition);
    }
    let normalize = |v: &[f64]| -> ProbabilityMeasure {
        let mass: f64 = v.iter().sum();
        ProbabilityMeasure {
            weights: v.iter().map(|x| x / mass).collect(),
        }
    };
    let nu_plus = normalize(&jd.plus);
    let nu_minus = normalize(&jd.minus);

    // mu_rho - eps nu_+ = pointwise min(mu_rho, mu_sigma); its mass is 1 - eps.
    let common: Vec<f64> = mu_rho
        .weights
        .iter()
        .zip(&mu_sigma.weights)
        .map(|(a, b)| a.min(*b))
        .collect();
    let common_mass: f64 = common.iter().sum();
    let (mu_star, omega_star) = if common_mass == 0.0 {
        (None, None)
    } else {
        let mu_star = normalize(&common);
        let omega_star = barycenter(ens, &mu_star)?;
        (Some(mu_star), Some(omega_star))
    };

    Ok(StatePairDecomposition {
        epsilon: jd.epsilon,
        tau_plus: barycenter(ens, &nu_plus)?,
        tau_minus: barycenter(ens, &nu_minus)?,
        nu_plus,
        nu_minus,
        mu_star,
        omega_star,
    })
}

/// A function on states satisfying almost-affinity:
/// `f(p rho + (1-p) sigma) >= p f(rho) + (1-p) f(sigma) - a(p)` and
/// `<= p f(rho) + (1-p) f(sigma) + b(p)`, with continuous moduli vanishing
/// at 0.
pub struct LaaFunction {
    name: String,
    f: Box<dyn Fn(&DensityMatrix) -> f64 + Send + Sync>,
    a: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    b: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for LaaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LaaFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl LaaFunction {
    /// The moduli must vanish at 0; that is checked here, the almost-affinity
    /// inequalities themselves are the caller's claim (testable with
    /// [`laa_moduli_check`]).
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&DensityMatrix) -> f64 + Send + Sync + 'static,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if a(0.0).abs() > 1e-12 {
            return Err(Error::DomainViolation {
                what: "a_f(0)",
                value: a(0.0),
            });
        }
        if b(0.0).abs() > 1e-12 {
            return Err(Error::DomainViolation {
                what: "b_f(0)",
                value: b(0.0),
            });
        }
        Ok(Self {
            name: name.into(),
            f: Box::new(f),
            a: Box::new(a),
            b: Box::new(b),
        })
    }

    /// Von Neumann entropy with its standard moduli: exact concavity
    /// (`a = 0`) and the mixing-entropy bound (`b = h2`).
    pub fn von_neumann() -> Self {
        Self::new(
            "von-neumann-entropy",
            |rho| von_neumann_entropy(rho).expect("entropy of a valid state"),
            |_| 0.0,
            h2_unit,
        )
        .expect("moduli vanish at 0")
    }

    /// Affine expectation value `rho -> tr(h rho)`; both moduli vanish.
    pub fn observable(h: HermitianMatrix) -> Self {
        Self::new(
            "observable",
            move |rho| {
                h.trace_product(&rho.to_hermitian())
                    .expect("dimension checked by caller")
            },
            |_| 0.0,
            |_| 0.0,
        )
        .expect("moduli vanish at 0")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, rho: &DensityMatrix) -> f64 {
        (self.f)(rho)
    }

    pub fn a_mod(&self, p: f64) -> f64 {
        (self.a)(p)
    }

    pub fn b_mod(&self, p: f64) -> f64 {
        (self.b)(p)
    }
}

/// Project `w` onto the capped simplex `{0 <= v <= caps, sum v = 1}`.
/// Feasible whenever `sum caps >= 1`.
fn project_capped_simplex(w: &[f64], caps: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = w
        .iter()
        .zip(caps)
        .map(|(&x, &c)| x.max(0.0).min(c))
        .collect();
    for _ in 0..4 {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() <= 1e-15 {
            break;
        }
        if sum > 1.0 {
            for x in &mut v {
                *x /= sum;
            }
        } else {
            let headroom: Vec<f64> = v.iter().zip(caps).map(|(&x, &c)| c - x).collect();
            let total: f64 = headroom.iter().sum();
            let deficit = 1.0 - sum;
            for (x, h) in v.iter_mut().zip(&headroom) {
                *x += deficit * h / total;
            }
        }
    }
    v
}

/// Certified lower estimate of
/// `C_f^+(rho | eps) = sup { f(q) : q represented, eps q <= rho }`.
///
/// The search is restricted to measures `nu` with `eps nu <= mu_rho`
/// pointwise. Because the kernel is operator-positive, this is a sufficient
/// condition for `eps barycenter(nu) <= rho`, so every evaluated point is
/// feasible and the maximum found is a genuine lower estimate of the
/// supremum (an *inner approximation*; the true value may be larger).
/// Projected random starts plus pairwise mass-transfer line search,
/// `budget` objective evaluations, deterministic per seed.
pub fn cf_plus_estimate(
    ens: &DiscreteEnsemble,
    f: &LaaFunction,
    mu_rho: &ProbabilityMeasure,
    eps: f64,
    budget: usize,
    seed: u64,
) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    if mu_rho.len() != ens.len() {
        return Err(Error::SizeMismatch {
            left: mu_rho.len(),
            right: ens.len(),
        });
    }
    let n = ens.len();
    let caps: Vec<f64> = mu_rho.weights.iter().map(|w| w / eps).collect();
    let mut rng_ = rng::seeded(seed);

    let evals = std::cell::Cell::new(0usize);
    let eval = |v: &[f64]| -> Result<f64> {
        evals.set(evals.get() + 1);
        let mu = ProbabilityMeasure {
            weights: v.to_vec(),
        };
        Ok(f.eval(&barycenter(ens, &mu)?))
    };

    // mu_rho itself is always feasible (eps <= 1), value f(rho).
    let mut current = mu_rho.weights.clone();
    let mut current_val = eval(&current)?;
    let mut best = current_val;

    'outer: while evals.get() < budget {
        let mut improved = false;
        for i in 0..n {
            for j in (i + 1)..n {
                if evals.get() >= budget {
                    break 'outer;
                }
                // Move mass t from j to i; negative t moves the other way.
                let hi = (caps[i] - current[i]).min(current[j]).max(0.0);
                let lo = -(current[i].min(caps[j] - current[j])).max(0.0);
                if hi - lo < 1e-14 {
                    continue;
                }
                let apply = |t: f64, from: &[f64]| {
                    let mut v = from.to_vec();
                    v[i] += t;
                    v[j] -= t;
                    v[i] = v[i].clamp(0.0, caps[i]);
                    v[j] = v[j].clamp(0.0, caps[j]);
                    v
                };
                // Coarse grid, then golden-section refinement around the best.
                let mut best_t = 0.0;
                let mut best_v = current_val;
                for k in 0..=6 {
                    let t = lo + (hi - lo) * k as f64 / 6.0;
                    let val = eval(&apply(t, &current))?;
                    if val > best_v {
                        best_v = val;
                        best_t = t;
                    }
                    if evals.get() >= budget {
                        break;
                    }
                }
                let step = (hi - lo) / 6.0;
                let (mut a, mut b) = ((best_t - step).max(lo), (best_t + step).min(hi));
                const INV_PHI: f64 = 0.6180339887498949;
                for _ in 0..24 {
                    if evals.get() + 2 > budget || b - a < 1e-12 {
                        break;
                    }
                    let x1 = b - INV_PHI * (b - a);
                    let x2 = a + INV_PHI * (b - a);
                    let f1 = eval(&apply(x1, &current))?;
                    let f2 = eval(&apply(x2, &current))?;
                    if f1 > best_v {
                        best_v = f1;
                        best_t = x1;
                    }
                    if f2 > best_v {
                        best_v = f2;
                        best_t = x2;
                    }
                    if f1 < f2 {
                        a = x1;
                    } else {
                        b = x2;
                    }
                }
                if best_v > current_val + 1e-13 {
                    current = apply(best_t, &current);
                    current_val = best_v;
                    improved = true;
                }
            }
        }
        best = best.max(current_val);
        if !improved {
            // Restart from a projected random measure.
            if evals.get() >= budget {
                break;
            }
            let start = rng::dirichlet(&mut rng_, n);
            current = project_capped_simplex(&start, &caps);
            current_val = eval(&current)?;
            best = best.max(current_val);
        }
    }
    Ok(best)
}

/// The generic semicontinuity bound
/// `eps * cf_value + a_f(eps) + b_f(eps)` at `eps = TV(mu_rho, mu_sigma)`;
/// exactly 0 when the measures coincide. `cf_value` is the caller's bound
/// on the constrained supremum (an analytic cap such as `ln dim`, or a
/// [`cf_plus_estimate`] when exploring tightness).
pub fn generic_bound(
    ens: &DiscreteEnsemble,
    f: &LaaFunction,
    mu_rho: &ProbabilityMeasure,
    mu_sigma: &ProbabilityMeasure,
    cf_value: f64,
) -> Result<f64> {
    if mu_rho.len() != ens.len() || mu_sigma.len() != ens.len() {
        return Err(Error::SizeMismatch {
            left: mu_rho.len().max(mu_sigma.len()),
            right: ens.len(),
        });
    }
    let eps = tv(mu_rho, mu_sigma)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * cf_value + f.a_mod(eps) + f.b_mod(eps))
}

/// Empirically probe the almost-affinity inequalities: sample barycenter
/// pairs and mixing weights, return the largest observed violation of
/// either modulus (0 when both inequalities hold on every sample).
pub fn laa_moduli_check(
    f: &LaaFunction,
    ens: &DiscreteEnsemble,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng_ = rng::seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mu1 = ProbabilityMeasure::random(&mut rng_, ens.len());
        let mu2 = ProbabilityMeasure::random(&mut rng_, ens.len());
        let p: f64 = rng_.random();
        let rho = barycenter(ens, &mu1)?;
        let sigma = barycenter(ens, &mu2)?;
        let mixed = rho.mix(&sigma, 1.0 - p)?; // p rho + (1-p) sigma
        let fr = f.eval(&rho);
        let fs = f.eval(&sigma);
        let fm = f.eval(&mixed);
        let expected = p * fr + (1.0 - p) * fs;
        worst = worst.max(expected - f.a_mod(p) - fm);
        worst = worst.max(fm - expected - f.b_mod(p));
    }
    Ok(worst.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h2;
    use crate::operator::{random_density, trace_distance};
    use std::f64::consts::LN_2;

    fn diag_ensemble() -> DiscreteEnsemble {
        DiscreteEnsemble::from_kernel(vec![
            DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap(),
            DensityMatrix::from_probabilities(&[0.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    fn random_ensemble(n: usize, dim: usize, seed: u64) -> DiscreteEnsemble {
        let kernel: Vec<DensityMatrix> = (0..n)
            .map(|i| {
                let rank = (seed as usize + i) % dim + 1;
                random_density(dim, rank, seed * 1000 + i as u64).unwrap()
            })
            .collect();
        DiscreteEnsemble::from_kernel(kernel).unwrap()
    }

    #[test]
    fn barycenter_examples() {
        let ens = diag_ensemble();
        let point = ProbabilityMeasure::point_mass(2, 0);
        let b = barycenter(&ens, &point).unwrap();
        assert!(b.max_abs_diff(&ens.kernel()[0]) < 1e-15);

        let rho0 = random_density(3, 3, 5).unwrap();
        let constant = DiscreteEnsemble::from_kernel(vec![rho0.clone(), rho0.clone()]).unwrap();
        let b = barycenter(&constant, &ProbabilityMeasure::uniform(2)).unwrap();
        assert!(b.max_abs_diff(&rho0) < 1e-15);

        let mu = ProbabilityMeasure::new(vec![0.7, 0.3]).unwrap();
        let b = barycenter(&ens, &mu).unwrap();
        let expect = DensityMatrix::from_probabilities(&[0.7, 0.3]).unwrap();
        assert!(b.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn jordan_decompose_examples() {
        let mu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        let jd = jordan_decompose(&mu, &mu).unwrap();
        assert_eq!(jd.epsilon, 0.0);
        assert!(jd.plus.iter().all(|&x| x == 0.0));

        let a = ProbabilityMeasure::new(vec![1.0, 0.0]).unwrap();
        let b = ProbabilityMeasure::new(vec![0.0, 1.0]).unwrap();
        let jd = jordan_decompose(&a, &b).unwrap();
        assert_eq!(jd.plus, vec![1.0, 0.0]);
        assert_eq!(jd.minus, vec![0.0, 1.0]);
        assert_eq!(jd.epsilon, 1.0);

        let mu = ProbabilityMeasure::new(vec![0.7, 0.3]).unwrap();
        let nu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        let jd = jordan_decompose(&mu, &nu).unwrap();
        assert!((jd.plus[0] - 0.2).abs() < 1e-15 && jd.plus[1] == 0.0);
        assert!(jd.minus[0] == 0.0 && (jd.minus[1] - 0.2).abs() < 1e-15);
        assert!((jd.epsilon - 0.2).abs() < 1e-15);
    }

    #[test]
    fn jordan_masses_match_tv_exactly() {
        let mut r = crate::rng::seeded(31);
        for _ in 0..200 {
            let mu = ProbabilityMeasure::random(&mut r, 16);
            let nu = ProbabilityMeasure::random(&mut r, 16);
            let jd = jordan_decompose(&mu, &nu).unwrap();
            let plus_mass: f64 = jd.plus.iter().sum();
            let minus_mass: f64 = jd.minus.iter().sum();
            let d = tv(&mu, &nu).unwrap();
            assert!((plus_mass - minus_mass).abs() <= tol::MASS_IDENTITY);
            assert!((plus_mass - d).abs() <= tol::MASS_IDENTITY);
            // domination: [mu - nu]_+ <= mu pointwise
            for (p, m) in jd.plus.iter().zip(mu.weights()) {
                assert!(p <= m);
            }
        }
    }

    #[test]
    fn state_pair_degenerate_and_disjoint() {
        let ens = diag_ensemble();
        let mu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            decompose_state_pair(&ens, &mu, &mu),
            Err(Error::DegenerateDecomposition)
        ));

        let a = ProbabilityMeasure::new(vec![1.0, 0.0]).unwrap();
        let b = ProbabilityMeasure::new(vec![0.0, 1.0]).unwrap();
        let dec = decompose_state_pair(&ens, &a, &b).unwrap();
        assert_eq!(dec.epsilon, 1.0);
        assert!(dec.omega_star.is_none());
        assert!(dec.tau_plus.max_abs_diff(&ens.kernel()[0]) < 1e-15);
        assert!(dec.tau_minus.max_abs_diff(&ens.kernel()[1]) < 1e-15);
    }

    #[test]
    fn state_pair_worked_example() {
        let ens = diag_ensemble();
        let mu = ProbabilityMeasure::new(vec![0.7, 0.3]).unwrap();
        let nu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        let dec = decompose_state_pair(&ens, &mu, &nu).unwrap();
        assert!((dec.epsilon - 0.2).abs() < 1e-15);
        assert_eq!(dec.nu_plus.weights(), &[1.0, 0.0]);
        assert_eq!(dec.nu_minus.weights(), &[0.0, 1.0]);
        let mu_star = dec.mu_star.unwrap();
        assert!((mu_star.weight(0) - 0.625).abs() < 1e-15);
        assert!((mu_star.weight(1) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn state_pair_reconstruction_and_domination() {
        for seed in 0..60u64 {
            let n = 2 + (seed as usize % 7);
            let dim = 2 + (seed as usize % 3) * 2;
            let ens = random_ensemble(n, dim, seed + 1);
            let mut r = crate::rng::seeded(777 + seed);
            let mu = ProbabilityMeasure::random(&mut r, n);
            let nu = ProbabilityMeasure::random(&mut r, n);
            let rho = barycenter(&ens, &mu).unwrap();
            let sigma = barycenter(&ens, &nu).unwrap();
            let dec = decompose_state_pair(&ens, &mu, &nu).unwrap();
            let eps = dec.epsilon;
            assert!(eps < 1.0, "random measures should overlap");
            let omega = dec.omega_star.as_ref().unwrap();

            // rho = eps tau_+ + (1 - eps) omega_*, entrywise
            let rebuilt = dec.tau_plus.mix(omega, 1.0 - eps).unwrap();
            assert!(rho.max_abs_diff(&rebuilt) < tol::RECONSTRUCTION);
            let rebuilt = dec.tau_minus.mix(omega, 1.0 - eps).unwrap();
            assert!(sigma.max_abs_diff(&rebuilt) < tol::RECONSTRUCTION);

            // domination: smallest eigenvalues of the differences
            let floor = |x: &DensityMatrix, scale: f64, y: &DensityMatrix| -> f64 {
                let entries: Vec<num_complex::Complex64> = y
                    .entries()
                    .iter()
                    .zip(x.entries())
                    .map(|(a, b)| a - scale * b)
                    .collect();
                let h = HermitianMatrix::from_raw_symmetrized(y.dim(), entries);
                h.eigenvalues().unwrap()[0]
            };
            assert!(floor(&dec.tau_plus, eps, &rho) >= -1e-10);
            assert!(floor(&dec.tau_minus, eps, &sigma) >= -1e-10);
            assert!(floor(omega, 1.0 - eps, &rho) >= -1e-10);

            // trace distance of barycenters contracts under TV
            let td = trace_distance(&rho, &sigma).unwrap();
            assert!(td <= tv(&mu, &nu).unwrap() + 1e-10);
        }
    }

    #[test]
    fn state_pair_entropy_bound_on_commuting_kernels() {
        // With a diagonal (commuting) kernel everything is exactly a
        // classical computation; the proof inequality must hold sample-wise.
        let f = LaaFunction::von_neumann();
        for seed in 0..200u64 {
            let mut r = crate::rng::seeded(2000 + seed);
            let n = 3 + (seed as usize % 6);
            let dim = 3;
            let kernel: Vec<DensityMatrix> = (0..n)
                .map(|_| {
                    DensityMatrix::from_probabilities(&crate::rng::dirichlet(&mut r, dim)).unwrap()
                })
                .collect();
            let ens = DiscreteEnsemble::from_kernel(kernel).unwrap();
            let mu = ProbabilityMeasure::random(&mut r, n);
            let nu = ProbabilityMeasure::random(&mut r, n);
            let rho = barycenter(&ens, &mu).unwrap();
            let sigma = barycenter(&ens, &nu).unwrap();
            let dec = match decompose_state_pair(&ens, &mu, &nu) {
                Ok(d) => d,
                Err(Error::DegenerateDecomposition) => continue,
                Err(e) => panic!("{e}"),
            };
            let lhs = f.eval(&rho) - f.eval(&sigma);
            let eps = dec.epsilon;
            let rhs = eps * (f.eval(&dec.tau_plus) - f.eval(&dec.tau_minus))
                + f.a_mod(eps)
                + f.b_mod(eps);
            assert!(lhs <= rhs + 1e-9, "seed {seed}: lhs {lhs} > rhs {rhs}");
        }
    }

    #[test]
    fn cf_plus_at_eps_one_is_f_of_rho() {
        let ens = random_ensemble(4, 2, 9);
        let mut r = crate::rng::seeded(4);
        let mu = ProbabilityMeasure::random(&mut r, 4);
        let f = LaaFunction::von_neumann();
        let rho = barycenter(&ens, &mu).unwrap();
        let est = cf_plus_estimate(&ens, &f, &mu, 1.0, 400, 1).unwrap();
        assert!((est - f.eval(&rho)).abs() < 1e-9);
    }

    #[test]
    fn cf_plus_constant_kernel() {
        let rho0 = random_density(3, 2, 50).unwrap();
        let ens = DiscreteEnsemble::from_kernel(vec![rho0.clone(); 3]).unwrap();
        let f = LaaFunction::von_neumann();
        let mu = ProbabilityMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        for eps in [0.1, 0.5, 1.0] {
            let est = cf_plus_estimate(&ens, &f, &mu, eps, 200, 2).unwrap();
            assert!((est - f.eval(&rho0)).abs() < 1e-9);
        }
    }

    #[test]
    fn cf_plus_reaches_entropy_maximum() {
        let ens = diag_ensemble();
        let f = LaaFunction::von_neumann();
        let mu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        let est = cf_plus_estimate(&ens, &f, &mu, 0.5, 500, 3).unwrap();
        assert!((est - LN_2).abs() < 1e-6, "estimate {est}");
        // skewed start still recovers the max: nu = (1/2, 1/2) is feasible
        let mu = ProbabilityMeasure::new(vec![0.75, 0.25]).unwrap();
        let est = cf_plus_estimate(&ens, &f, &mu, 0.5, 2000, 3).unwrap();
        assert!((est - LN_2).abs() < 1e-6, "estimate {est}");
    }

    #[test]
    fn cf_plus_estimates_never_exceed_analytic_cap() {
        // inner approximation stays below ln(dim)
        for seed in 0..10u64 {
            let ens = random_ensemble(5, 2, 60 + seed);
            let f = LaaFunction::von_neumann();
            let mut r = crate::rng::seeded(seed);
            let mu = ProbabilityMeasure::random(&mut r, 5);
            let est = cf_plus_estimate(&ens, &f, &mu, 0.3, 300, seed).unwrap();
            assert!(est <= LN_2 + 1e-12);
        }
    }

    #[test]
    fn cf_plus_is_deterministic_per_seed() {
        let ens = random_ensemble(5, 3, 61);
        let f = LaaFunction::von_neumann();
        let mut r = crate::rng::seeded(2);
        let mu = ProbabilityMeasure::random(&mut r, 5);
        let a = cf_plus_estimate(&ens, &f, &mu, 0.4, 600, 17).unwrap();
        let b = cf_plus_estimate(&ens, &f, &mu, 0.4, 600, 17).unwrap();
        assert_eq!(a, b);
        assert!(cf_plus_estimate(&ens, &f, &mu, 1.5, 10, 0).is_err());
        assert!(cf_plus_estimate(&ens, &f, &mu, 0.0, 10, 0).is_err());
    }

    #[test]
    fn generic_bound_examples() {
        let ens = diag_ensemble();
        let f = LaaFunction::von_neumann();
        let mu = ProbabilityMeasure::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(generic_bound(&ens, &f, &mu, &mu, LN_2).unwrap(), 0.0);

        // eps = 0.3 against cf = ln d
        let nu = ProbabilityMeasure::new(vec![0.8, 0.2]).unwrap();
        let bound = generic_bound(&ens, &f, &mu, &nu, LN_2).unwrap();
        assert!((bound - (0.3 * LN_2 + h2(0.3).unwrap())).abs() < 1e-12);

        // eps = 0.2, cf = ln 2: 0.2 ln 2 + h2(0.2) ~ 0.6390
        let nu = ProbabilityMeasure::new(vec![0.7, 0.3]).unwrap();
        let bound = generic_bound(&ens, &f, &mu, &nu, LN_2).unwrap();
        assert!((bound - 0.639031859650177).abs() < 1e-10);
    }

    #[test]
    fn generic_bound_with_dimension_cap_is_valid() {
        // f(rho) - f(sigma) <= eps ln(d) + a(eps) + b(eps) with the analytic
        // cap ln(d) >= C_f^+; checked on random represented pairs.
        let f = LaaFunction::von_neumann();
        for seed in 0..80u64 {
            let n = 3 + (seed as usize % 5);
            let dim = 2 + (seed as usize % 3);
            let ens = random_ensemble(n, dim, 300 + seed);
            let mut r = crate::rng::seeded(4000 + seed);
            let mu = ProbabilityMeasure::random(&mut r, n);
            let nu = ProbabilityMeasure::random(&mut r, n);
            let lhs =
                f.eval(&barycenter(&ens, &mu).unwrap()) - f.eval(&barycenter(&ens, &nu).unwrap());
            let bound = generic_bound(&ens, &f, &mu, &nu, (dim as f64).ln()).unwrap();
            assert!(
                lhs <= bound + 1e-9,
                "seed {seed}: lhs {lhs} > bound {bound}"
            );
        }
    }

    #[test]
    fn laa_moduli_observable_is_affine() {
        let ens = random_ensemble(4, 3, 70);
        let h = HermitianMatrix::from_real_diagonal(&[0.0, 0.5, 2.0]);
        let f = LaaFunction::observable(h);
        let v = laa_moduli_check(&f, &ens, 500, 8).unwrap();
        assert!(v < 1e-12, "affine violation {v}");
    }

    #[test]
    fn laa_moduli_entropy_standard_moduli() {
        let ens = random_ensemble(6, 2, 80);
        let f = LaaFunction::von_neumann();
        let v = laa_moduli_check(&f, &ens, 2000, 9).unwrap();
        assert!(v < 1e-10, "entropy moduli violation {v}");
    }

    #[test]
    fn laa_moduli_entropy_needs_nonzero_b() {
        // with b = 0 the convexity side fails visibly on mixtures of
        // near-orthogonal states
        let ens = diag_ensemble();
        let f = LaaFunction::new(
            "entropy-no-b",
            |rho| von_neumann_entropy(rho).unwrap(),
            |_| 0.0,
            |_| 0.0,
        )
        .unwrap();
        let v = laa_moduli_check(&f, &ens, 500, 10).unwrap();
        assert!(v > 0.01, "expected a visible violation, got {v}");

        // the canonical witness: rho = |0><0|, sigma = |1><1|, p = 1/2
        let rho = &ens.kernel()[0];
        let sigma = &ens.kernel()[1];
        let mixed = rho.mix(sigma, 0.5).unwrap();
        let direct = von_neumann_entropy(&mixed).unwrap()
            - 0.5 * von_neumann_entropy(rho).unwrap()
            - 0.5 * von_neumann_entropy(sigma).unwrap();
        assert!((direct - LN_2).abs() < 1e-12);
    }

    #[test]
    fn laa_constructor_rejects_nonvanishing_moduli() {
        let r = LaaFunction::new("bad", |_| 0.0, |_| 1.0, |_| 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn ensemble_json_round_trip() {
        let ens = random_ensemble(3, 2, 90);
        let text = serde_json::to_string(&ens.to_json()).unwrap();
        let back = DiscreteEnsemble::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.dim(), 2);
        for (a, b) in ens.kernel().iter().zip(back.kernel()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }
}
