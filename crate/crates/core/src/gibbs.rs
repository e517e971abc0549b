//! Maximum entropy under an energy constraint.
//!
//! A Hamiltonian enters the bounds only through its spectrum, so the type
//! here is a nondecreasing level sequence with ground energy 0. Spectra are
//! either *finite* (an exact explicit list, any real inverse temperature is
//! meaningful) or *truncated* (the first `N` levels of an infinite ladder;
//! only `beta > 0` is meaningful and every evaluation must pass a
//! truncation-tail certificate).
//!
//! The central quantity is `F_H(E) = sup { S(rho) : tr H rho <= E }`, the
//! entropy of the Gibbs state `gamma_H(E) = exp(-beta(E) H) / Z` with
//! `beta(E)` solved from `tr H exp(-beta H) = E tr exp(-beta H)`. For a
//! finite spectrum and `E` at or above the arithmetic mean of the levels the
//! inequality constraint stops binding and `F_H(E) = ln N`, attained by the
//! maximally mixed state; that case is reported via [`FhValue::capped`].

use serde::{Deserialize, Serialize};

use crate::entropy::shannon_entropy;
use crate::operator::{DensityMatrix, HermitianMatrix};
use crate::{tol, Error, Result};

/// Default number of materialized levels for generator-defined spectra.
pub const DEFAULT_TRUNCATION: usize = 512;

const BRACKET_LIMIT: f64 = 1048576.0; // 2^20
const BRACKET_START: f64 = 9.5367431640625e-7; // 2^-20
const MAX_BISECTIONS: usize = 200;

/// Nondecreasing energy levels `e_0 = 0 <= e_1 <= ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpectrum {
    levels: Vec<f64>,
    truncated: bool,
    /// First omitted level when a generator rule makes it known.
    next_level: Option<f64>,
}

/// JSON exchange format for spectra:
/// `{"kind": "list", "levels": [...]}` or
/// `{"kind": "linear", "omega": w, "N": n}` (`N` defaults to 512).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumJson {
    List {
        levels: Vec<f64>,
    },
    Linear {
        omega: f64,
        #[serde(rename = "N", default = "default_truncation")]
        n: usize,
    },
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

/// Outcome of the truncation-tail certificate for the Gibbs condition.
#[derive(Debug, Clone, Copy)]
pub struct GibbsDiagnostic {
    pub passes: bool,
    /// `exp(-beta_min * e_tail) * N / Z_N`; 0 for finite spectra.
    pub tail_ratio: f64,
    pub levels_used: usize,
    pub finite: bool,
}

/// `F_H` evaluation with the finite-spectrum cap made visible.
#[derive(Debug, Clone, Copy)]
pub struct FhValue {
    pub value: f64,
    /// True when the unconstrained maximum `ln N` was returned because the
    /// energy constraint stopped binding (finite spectra only).
    pub capped: bool,
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidSpectrum {
            reason: "no levels".into(),
        });
    }
    if !levels.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidSpectrum {
            reason: "levels must be finite".into(),
        });
    }
    if levels[0].abs() > 1e-12 {
        return Err(Error::InvalidSpectrum {
            reason: format!("ground energy must be 0 (got {})", levels[0]),
        });
    }
    if levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSpectrum {
            reason: "levels must be nondecreasing".into(),
        });
    }
    Ok(())
}

impl HamiltonianSpectrum {
    /// Exact finite spectrum.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        validate_levels(&levels)?;
        Ok(Self {
            levels,
            truncated: false,
            next_level: None,
        })
    }

    /// Linear ladder `e_k = k * omega`, truncated at `n` levels.
    pub fn linear(omega: f64, n: usize) -> Result<Self> {
        if !(omega > 0.0) || n == 0 {
            return Err(Error::InvalidSpectrum {
                reason: format!(
                    "linear spectrum needs omega > 0 and N >= 1 (omega = {omega}, N = {n})"
                ),
            });
        }
        Ok(Self {
            levels: (0..n).map(|k| k as f64 * omega).collect(),
            truncated: true,
            next_level: Some(n as f64 * omega),
        })
    }

    /// Truncation of an infinite spectrum given by an explicit level list
    /// (generator rule materialized by the caller).
    pub fn truncated_levels(levels: Vec<f64>) -> Result<Self> {
        validate_levels(&levels)?;
        Ok(Self {
            levels,
            truncated: true,
            next_level: None,
        })
    }

    pub fn from_json(json: SpectrumJson) -> Result<Self> {
        match json {
            SpectrumJson::List { levels } => Self::from_levels(levels),
            SpectrumJson::Linear { omega, n } => Self::linear(omega, n),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: SpectrumJson = serde_json::from_str(text).map_err(|source| Error::Parse {
            path: "<spectrum>".into(),
            source,
        })?;
        Self::from_json(json)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn max_level(&self) -> f64 {
        *self.levels.last().expect("nonempty")
    }

    pub fn arithmetic_mean(&self) -> f64 {
        self.levels.iter().sum::<f64>() / self.levels.len() as f64
    }

    /// The first `d` levels, for building the diagonal Hamiltonian on a
    /// `d`-dimensional subspace.
    pub fn first_levels(&self, d: usize) -> Result<&[f64]> {
        if d > self.levels.len() {
            return Err(Error::DimensionMismatch {
                left: d,
                right: self.levels.len(),
            });
        }
        Ok(&self.levels[..d])
    }

    /// Diagonal Hamiltonian on the first `d` levels.
    pub fn diagonal_hamiltonian(&self, d: usize) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::from_real_diagonal(self.first_levels(d)?))
    }

    /// Short identifier for reports.
    pub fn describe(&self) -> String {
        if let Some(next) = self.next_level {
            let n = self.levels.len();
            if n >= 2 {
                let omega = self.levels[1];
                if (next - n as f64 * omega).abs() < 1e-12 {
                    return format!("linear(omega={omega},N={n})");
                }
            }
        }
        let kind = if self.truncated { "truncated" } else { "list" };
        let n = self.levels.len();
        if n <= 4 {
            let body: Vec<String> = self.levels.iter().map(|x| x.to_string()).collect();
            format!("{kind}[{}]", body.join(","))
        } else {
            format!("{kind}[0..{}; len={n}]", self.max_level())
        }
    }

    fn require_beta(&self, beta: f64) -> Result<()> {
        if self.truncated && beta <= 0.0 {
            return Err(Error::NonPositiveBeta { beta });
        }
        Ok(())
    }

    fn tail_ratio_at(&self, beta: f64, levels_used: usize) -> f64 {
        let n = levels_used.min(self.levels.len());
        let e_tail = if n < self.levels.len() {
            self.levels[n]
        } else {
            // Conservative stand-in when the generator rule is unknown: the
            // last materialized level under-states the true gap.
            self.next_level.unwrap_or(self.max_level())
        };
        let z: f64 = self.levels[..n].iter().map(|e| (-beta * e).exp()).sum();
        (-beta * e_tail).exp() * n as f64 / z
    }

    /// Truncation-tail certificate: passes iff
    /// `exp(-beta_min * e_N) * N <= TAIL_CERTIFICATE * Z_N`. Finite spectra
    /// always pass. `n` restricts the check to the first `n` levels
    /// (clamped to the materialized length).
    pub fn check_gibbs_condition(
        &self,
        beta_min: f64,
        n: Option<usize>,
    ) -> Result<GibbsDiagnostic> {
        if !(beta_min > 0.0) {
            return Err(Error::DomainViolation {
                what: "beta_min",
                value: beta_min,
            });
        }
        let levels_used = n.unwrap_or(self.levels.len()).min(self.levels.len()).max(1);
        if !self.truncated {
            return Ok(GibbsDiagnostic {
                passes: true,
                tail_ratio: 0.0,
                levels_used,
                finite: true,
            });
        }
        let ratio = self.tail_ratio_at(beta_min, levels_used);
        Ok(GibbsDiagnostic {
            passes: ratio <= tol::TAIL_CERTIFICATE,
            tail_ratio: ratio,
            levels_used,
            finite: false,
        })
    }

    fn certify(&self, beta: f64) -> Result<()> {
        if self.truncated {
            let ratio = self.tail_ratio_at(beta, self.levels.len());
            if ratio > tol::TAIL_CERTIFICATE {
                return Err(Error::TruncationNotConverged { beta, ratio });
            }
        }
        Ok(())
    }

    /// Partition function `Z(beta) = sum_k exp(-beta e_k)`. For truncated
    /// spectra requires `beta > 0` and a passing tail certificate at `beta`.
    pub fn partition_function(&self, beta: f64) -> Result<f64> {
        self.require_beta(beta)?;
        self.certify(beta)?;
        Ok(self.levels.iter().map(|e| (-beta * e).exp()).sum())
    }

    /// Boltzmann probabilities at `beta`, computed with a max-shift so
    /// negative `beta` on finite spectra cannot overflow.
    fn weights_unchecked(&self, beta: f64) -> Vec<f64> {
        let shift = self
            .levels
            .iter()
            .map(|e| -beta * e)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = self
            .levels
            .iter()
            .map(|e| (-beta * e - shift).exp())
            .collect();
        let sum: f64 = w.iter().sum();
        for x in &mut w {
            *x /= sum;
        }
        w
    }

    fn mean_energy_unchecked(&self, beta: f64) -> f64 {
        self.weights_unchecked(beta)
            .iter()
            .zip(&self.levels)
            .map(|(p, e)| p * e)
            .sum()
    }

    /// Mean energy `tr H e^{-beta H} / Z(beta)`, strictly decreasing in
    /// `beta`. Same preconditions as [`Self::partition_function`].
    pub fn mean_energy(&self, beta: f64) -> Result<f64> {
        self.require_beta(beta)?;
        self.certify(beta)?;
        Ok(self.mean_energy_unchecked(beta))
    }

    /// Solve `mean_energy(beta) = energy` by bracketing and bisection.
    ///
    /// For a finite spectrum with `energy` at or above the arithmetic mean
    /// of the levels the solution has `beta <= 0`; callers that need
    /// `beta > 0` must check. For truncated spectra the solution must be
    /// positive and pass the tail certificate, otherwise the truncation is
    /// too short for this energy.
    pub fn solve_beta(&self, energy: f64) -> Result<f64> {
        if !(energy > 0.0) {
            return Err(Error::NonPositiveEnergy { energy });
        }
        let mean0 = self.arithmetic_mean();
        let phi = |beta: f64| self.mean_energy_unchecked(beta) - energy;
        let tol_e = tol::BETA_SOLVE * energy.max(1.0);

        if !self.truncated && energy >= self.max_level() {
            return Err(Error::EnergyAboveSpectrum {
                energy,
                max_level: self.max_level(),
            });
        }
        if (mean0 - energy).abs() <= tol_e {
            if self.truncated {
                return Err(Error::BracketNotFound { energy });
            }
            return Ok(0.0);
        }

        let (mut lo, mut hi);
        if energy < mean0 {
            // beta > 0 branch: expand upward until the mean drops below E.
            lo = 0.0;
            hi = BRACKET_START;
            while phi(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
                if hi > BRACKET_LIMIT {
                    return Err(Error::BracketNotFound { energy });
                }
            }
        } else {
            // beta < 0 branch, finite spectra only.
            if self.truncated {
                return Err(Error::BracketNotFound { energy });
            }
            hi = 0.0;
            let mut probe = -BRACKET_START;
            while phi(probe) < 0.0 {
                hi = probe;
                probe *= 2.0;
                if probe < -BRACKET_LIMIT {
                    return Err(Error::BracketNotFound { energy });
                }
            }
            lo = probe;
        }

        // Invariant: phi(lo) >= 0 >= phi(hi) (phi is decreasing).
        let mut best = 0.5 * (lo + hi);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            let f = phi(mid);
            best = mid;
            if f.abs() <= tol_e {
                break;
            }
            if f > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if phi(best).abs() > tol_e {
            return Err(Error::ConvergenceFailure {
                what: format!("beta bisection stalled at energy {energy}"),
            });
        }
        if self.truncated {
            self.certify(best)?;
        }
        Ok(best)
    }

    /// Diagonal of the Gibbs state `gamma_H(E)`: probabilities
    /// `p_k = exp(-beta(E) e_k) / Z`.
    pub fn gibbs_state(&self, energy: f64) -> Result<Vec<f64>> {
        let beta = self.solve_beta(energy)?;
        let w = self.weights_unchecked(beta);
        let mean: f64 = w.iter().zip(&self.levels).map(|(p, e)| p * e).sum();
        if (mean - energy).abs() > tol::GIBBS_MEAN_ENERGY * energy.max(1.0) {
            return Err(Error::ConvergenceFailure {
                what: format!("Gibbs state mean energy {mean} != {energy}"),
            });
        }
        Ok(w)
    }

    /// `F_H(E)`, the maximal entropy among states with mean energy at most
    /// `E`, with the finite-spectrum cap flag.
    pub fn f_h_detail(&self, energy: f64) -> Result<FhValue> {
        if !(energy > 0.0) {
            return Err(Error::NonPositiveEnergy { energy });
        }
        if !self.truncated && energy >= self.arithmetic_mean() {
            // The maximally mixed state is feasible; the constraint is slack.
            return Ok(FhValue {
                value: (self.levels.len() as f64).ln(),
                capped: true,
            });
        }
        let w = self.gibbs_state(energy)?;
        Ok(FhValue {
            value: shannon_entropy(&w)?,
            capped: false,
        })
    }

    /// `F_H(E)` as a plain value.
    ///
    /// ```
    /// use sembound_core::HamiltonianSpectrum;
    ///
    /// // two-level system: F_H(1/4) is the entropy of the (3/4, 1/4) state
    /// let spec = HamiltonianSpectrum::from_levels(vec![0.0, 1.0]).unwrap();
    /// let expect = -(0.75f64.ln() * 0.75 + 0.25f64.ln() * 0.25);
    /// assert!((spec.f_h(0.25).unwrap() - expect).abs() < 1e-9);
    /// ```
    pub fn f_h(&self, energy: f64) -> Result<f64> {
        Ok(self.f_h_detail(energy)?.value)
    }
}

/// Energy offset `E_{H,eps}(rho) = tr H [rho - eps I]_+`: the part of the
/// mean energy carried by the spectral mass of `rho` above level `eps`.
/// Equals `tr H rho` at `eps = 0` and vanishes once `eps` exceeds the top
/// eigenvalue of `rho`.
pub fn energy_offset(h: &HermitianMatrix, rho: &DensityMatrix, eps: f64) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: rho.dim(),
        });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    let shifted = rho.to_hermitian().shifted(-eps);
    let plus = shifted.positive_part()?;
    h.trace_product(&plus)
}
