//! The user-facing bound formulas.
//!
//! Every family exists in two variants differing only in the correction
//! term: the `old` one uses `g(eps) = (1+eps) h2(eps/(1+eps))`, the `new`
//! one the strictly smaller `h2_tilde(eps)`. [`compare_corrections`]
//! tabulates the gap.
//!
//! Entropy under an energy constraint (`tr H rho <= E`, ground energy 0):
//!
//! ```text
//! S(rho) - S(sigma) <= eps F_H((E - E_off)/eps) + h2_tilde(eps)
//!                   <= eps F_H(E/eps) + h2_tilde(eps)
//! ```
//!
//! where the optional offset `E_off = tr H [rho - eps I]_+` tightens the
//! energy budget using the concrete state. Equivocation for discrete pairs
//! with `E(X1) <= E`:
//!
//! ```text
//! H(X1|X2)_p - H(Y1|Y2)_q <= eps g(E/eps) + h2_tilde(eps)
//! ```
//!
//! whose first term keeps `g`: swapping it for `h2_tilde` breaks the bound
//! (see `campaign::equivocation_tightness_probe`).
//!
//! All evaluators treat `eps = 0` as the exact-match case and return 0.

use serde::{Deserialize, Serialize};

use crate::entropy::{g_func, h2_tilde};
use crate::gibbs::{energy_offset, HamiltonianSpectrum};
use crate::operator::DensityMatrix;
use crate::{Error, Result};

/// Correction-term variant: `Old` for `g`, `New` for `h2_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Old,
    New,
}

impl Variant {
    /// The correction term of this variant at `eps` in `[0, 1]`.
    pub fn correction(self, eps: f64) -> Result<f64> {
        match self {
            Variant::Old => {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::DomainViolation {
                        what: "eps",
                        value: eps,
                    });
                }
                Ok(g_func(eps))
            }
            Variant::New => h2_tilde(eps),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "old" => Ok(Variant::Old),
            "new" => Ok(Variant::New),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown variant {other:?} (expected old or new)"),
            }),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Old => "old",
            Variant::New => "new",
        })
    }
}

/// Entropy bound evaluation with its diagnostic flags.
#[derive(Debug, Clone, Copy)]
pub struct EntropyBoundValue {
    pub value: f64,
    /// `eps * F_H(E_eff / eps)`.
    pub f_term: f64,
    /// `h2_tilde(eps)` or `g(eps)` depending on the variant.
    pub correction: f64,
    /// Energy budget after the offset (clamped at 0).
    pub effective_energy: f64,
    /// `E_off` when an offset state was supplied.
    pub offset: Option<f64>,
    /// The offset exceeded the budget; the F-term was clamped to 0.
    pub offset_clamped: bool,
    /// `F_H` hit the finite-spectrum cap `ln N`.
    pub f_capped: bool,
}

/// Semicontinuity bound for the von Neumann entropy under the energy
/// constraint `tr H rho <= E`.
///
/// With `offset_state` set, evaluates the tighter first form with
/// `E_off = tr H [rho - eps I]_+` (never larger than the plain form); a
/// negative effective budget is clamped to 0 and flagged, the F-term then
/// vanishes because the ground energy is 0.
pub fn entropy_bound(
    spec: &HamiltonianSpectrum,
    energy: f64,
    eps: f64,
    variant: Variant,
    offset_state: Option<&DensityMatrix>,
) -> Result<EntropyBoundValue> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }

    let offset = match offset_state {
        Some(rho) => {
            let h = spec.diagonal_hamiltonian(rho.dim())?;
            Some(energy_offset(&h, rho, eps)?)
        }
        None => None,
    };

    if eps == 0.0 {
        // Exact match: the bound degenerates to 0.
        return Ok(EntropyBoundValue {
            value: 0.0,
            f_term: 0.0,
            correction: 0.0,
            effective_energy: energy,
            offset,
            offset_clamped: false,
            f_capped: false,
        });
    }

    let raw_effective = energy - offset.unwrap_or(0.0);
    let offset_clamped = raw_effective < 0.0;
    let effective_energy = raw_effective.max(0.0);

    let (f_term, f_capped) = if effective_energy == 0.0 {
        // F_H(0) = 0: only the ground space is reachable.
        (0.0, false)
    } else {
        let fh = spec.f_h_detail(effective_energy / eps)?;
        (eps * fh.value, fh.capped)
    };
    let correction = variant.correction(eps)?;

    Ok(EntropyBoundValue {
        value: f_term + correction,
        f_term,
        correction,
        effective_energy,
        offset,
        offset_clamped,
        f_capped,
    })
}

/// Semicontinuity bound for the Shannon equivocation:
/// `eps g(E/eps) + h2_tilde(eps)`. The first term always uses `g`.
pub fn equivocation_bound(energy: f64, eps: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * g_func(energy / eps) + h2_tilde(eps)?)
}

/// Rank-constrained EoF bound in either variant:
/// `delta ln(rank_a) + correction(delta)` with `delta = sqrt(eps (2-eps))`.
pub fn eof_rank_bound(rank_a: usize, eps: f64, variant: Variant) -> Result<f64> {
    if rank_a == 0 {
        return Err(Error::DomainViolation {
            what: "rank_a",
            value: 0.0,
        });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let delta = crate::eof::delta_from_eps(eps)?;
    Ok(delta * (rank_a as f64).ln() + variant.correction(delta)?)
}

/// Energy-constrained EoF bound in either variant:
/// `delta F_H(E / delta) + correction(delta)`.
pub fn eof_energy_bound(
    spec: &HamiltonianSpectrum,
    energy: f64,
    eps: f64,
    variant: Variant,
) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::DomainViolation {
            what: "eps",
            value: eps,
        });
    }
    let delta = crate::eof::delta_from_eps(eps)?;
    Ok(delta * spec.f_h(energy / delta)? + variant.correction(delta)?)
}

/// One row of the old-versus-new correction comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrectionRow {
    pub eps: f64,
    pub g: f64,
    pub h2_tilde: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

/// Tabulate `g` against `h2_tilde` on a grid in `(0, 1]`. The gap is
/// positive everywhere on the grid.
pub fn compare_corrections(grid: &[f64]) -> Result<Vec<CorrectionRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "empty comparison grid".into(),
        });
    }
    grid.iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::DomainViolation {
                    what: "eps",
                    value: eps,
                });
            }
            let g = g_func(eps);
            let new = h2_tilde(eps)?;
            Ok(CorrectionRow {
                eps,
                g,
                h2_tilde: new,
                abs_gap: g - new,
                rel_gap: (g - new) / g,
            })
        })
        .collect()
}
