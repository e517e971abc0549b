//! Monte-Carlo bound-violation campaigns.
//!
//! A campaign draws constrained states (or joint distributions), perturbs
//! them to a target distance, measures the actual distance, evaluates the
//! bound *at the measured distance*, and records one [`BoundReport`] per
//! bound evaluated. Violations are counted against
//! [`tol::VIOLATION_SLACK`]; a correct implementation reports zero.
//!
//! Evaluating at the measured distance is sound because every right-hand
//! side here is nondecreasing in the distance (grid-checked in the module
//! tests), so a state pair at distance `eps' <= eps` satisfies the bound at
//! `eps'` a fortiori. No monotone envelope is needed; the flag in the
//! reports stays false.
//!
//! Per-trial randomness comes from an independent stream
//! (`master seed`, `trial index`), so campaigns are reproducible and
//! insensitive to trial reordering.

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{entropy_bound, equivocation_bound, Variant};
use crate::entropy::{
    conditional_entropy, h2_tilde, h2_unit, mean_value_x1, tv_distance, von_neumann_entropy,
    JointDistribution,
};
use crate::eof::{
    eof_bound_energy, eof_bound_rank, eof_two_qubit_oracle, eof_upper, numerical_rank,
};
use crate::gibbs::HamiltonianSpectrum;
use crate::operator::{
    partial_trace, random_density_rng, random_perturbation_rng, trace_distance,
    BipartiteDensityMatrix, DensityMatrix, Subsystem,
};
use crate::report::{BoundFamily, BoundReport, ReportFormat, ReportInputs};
use crate::{rng, Error, Result};

/// How the campaign builds the Hamiltonian spectrum for a given dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumChoice {
    /// Finite ladder `0, omega, 2 omega, ...` with exactly `d` levels.
    Ladder { omega: f64 },
    /// Fresh per-trial draw: `d - 1` sorted uniforms on `(0, max_level]`
    /// behind a 0 ground level.
    RandomSorted { max_level: f64 },
    /// Fixed level list, truncated to the first `d` levels.
    List { levels: Vec<f64> },
}

impl Default for SpectrumChoice {
    fn default() -> Self {
        SpectrumChoice::Ladder { omega: 1.0 }
    }
}

impl SpectrumChoice {
    fn build(&self, d: usize, rng_: &mut ChaCha8Rng) -> Result<HamiltonianSpectrum> {
        match self {
            SpectrumChoice::Ladder { omega } => {
                HamiltonianSpectrum::from_levels((0..d).map(|k| k as f64 * omega).collect())
            }
            SpectrumChoice::RandomSorted { max_level } => {
                let mut levels: Vec<f64> = std::iter::once(0.0)
                    .chain((1..d).map(|_| rng_.random::<f64>() * max_level))
                    .collect();
                levels.sort_by(f64::total_cmp);
                // the draw keeps 0 as the smallest value
                HamiltonianSpectrum::from_levels(levels)
            }
            SpectrumChoice::List { levels } => {
                if levels.len() < d {
                    return Err(Error::InvalidConfig {
                        reason: format!(
                            "spectrum list has {} levels, campaign dimension needs {d}",
                            levels.len()
                        ),
                    });
                }
                HamiltonianSpectrum::from_levels(levels[..d].to_vec())
            }
        }
    }
}

fn default_energy_grid() -> Vec<f64> {
    vec![1.0]
}

fn default_format() -> ReportFormat {
    ReportFormat::Csv
}

/// Campaign parameters, loadable from JSON.
///
/// `dims` means Hilbert-space dimensions for the entropy family,
/// `[dim_a, dim_b]` for the EoF family, and `[max_rows, max_cols]` of the
/// joint-distribution support for equivocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub trials: u64,
    pub dims: Vec<usize>,
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_energy_grid")]
    pub energy_grid: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub spectrum: SpectrumChoice,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: ReportFormat,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig {
                reason: "trials must be at least 1".into(),
            });
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidConfig {
                reason: "dims must be nonempty".into(),
            });
        }
        if self.eps_grid.is_empty() || self.energy_grid.is_empty() {
            return Err(Error::InvalidConfig {
                reason: "eps and energy grids must be nonempty".into(),
            });
        }
        if let Some(&bad) = self.eps_grid.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidConfig {
                reason: format!("eps grid value {bad} outside (0, 1]"),
            });
        }
        if let Some(&bad) = self.energy_grid.iter().find(|&&e| !(e > 0.0)) {
            return Err(Error::InvalidConfig {
                reason: format!("energy grid value {bad} must be positive"),
            });
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: CampaignConfig = serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Deterministic cell of the `(dims, energy, eps)` product grid for a trial.
fn grid_cell(cfg: &CampaignConfig, trial: u64) -> (usize, f64, f64) {
    let nd = cfg.dims.len() as u64;
    let ne = cfg.energy_grid.len() as u64;
    let neps = cfg.eps_grid.len() as u64;
    let d = cfg.dims[(trial % nd) as usize];
    let e = cfg.energy_grid[((trial / nd) % ne) as usize];
    let eps = cfg.eps_grid[((trial / (nd * ne)) % neps) as usize];
    (d, e, eps)
}

const SAMPLER_ATTEMPTS: usize = 256;

/// Rejection-sample a state with `tr H rho <= e_max` against a diagonal
/// Hamiltonian. Proposals alternate between plain random densities and
/// ground-state mixtures (which reach low energies); after exhausting the
/// attempt budget the ground state itself is returned (always feasible
/// since the ground energy is 0).
fn sample_energy_bounded_state(
    rng_: &mut ChaCha8Rng,
    levels: &[f64],
    e_max: f64,
) -> Result<DensityMatrix> {
    let d = levels.len();
    let ground = DensityMatrix::pure(
        &(0..d)
            .map(|i| {
                if i == 0 {
                    num_complex::Complex64::ONE
                } else {
                    num_complex::Complex64::ZERO
                }
            })
            .collect::<Vec<_>>(),
    )?;
    let diag_energy = |rho: &DensityMatrix| -> f64 {
        levels
            .iter()
            .enumerate()
            .map(|(i, &e)| e * rho.entry(i, i).re)
            .sum()
    };
    for attempt in 0..SAMPLER_ATTEMPTS {
        let rank = rng_.random_range(1..=d);
        let cand = random_density_rng(rng_, d, rank)?;
        let cand = if attempt % 2 == 1 {
            // mixing toward the ground state scales the energy by t
            let t = rng_.random::<f64>();
            ground.mix(&cand, t)?
        } else {
            cand
        };
        if diag_energy(&cand) <= e_max {
            return Ok(cand);
        }
    }
    Ok(ground)
}

/// Draw a `(rho, sigma)` pair at the requested trace distance, redrawing
/// `rho` when its geometry cannot reach the target (e.g. nearly maximally
/// mixed states, whose farthest state sits at distance `1 - 1/d`).
fn draw_perturbed_pair(
    rng_: &mut ChaCha8Rng,
    eps_target: f64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<DensityMatrix>,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let mut last_err = Error::PerturbationFailed { attempts: 0 };
    for _ in 0..32 {
        let rho = draw(rng_)?;
        match random_perturbation_rng(rng_, &rho, eps_target) {
            Ok(sigma) => return Ok((rho, sigma)),
            Err(e @ Error::PerturbationFailed { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Entropy-bound campaign: draws `tr H rho <= E` states, perturbs them, and
/// checks both variants with and without the energy offset, four reports
/// per trial, zero violations expected.
pub fn verify_entropy(cfg: &CampaignConfig) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    let mut reports = Vec::with_capacity(cfg.trials as usize * 4);
    for trial in 0..cfg.trials {
        let mut rng_ = rng::trial(cfg.seed, trial);
        let (d, energy, eps_target) = grid_cell(cfg, trial);
        let spec = cfg.spectrum.build(d, &mut rng_)?;
        let levels = spec.first_levels(d)?.to_vec();

        // A very mixed state cannot be perturbed far (max trace distance
        // from I/d is 1 - 1/d); redraw until the target is reachable.
        let (rho, sigma) = draw_perturbed_pair(&mut rng_, eps_target, |r| {
            sample_energy_bounded_state(r, &levels, energy)
        })?;
        let eps = trace_distance(&rho, &sigma)?;
        let lhs = von_neumann_entropy(&rho)? - von_neumann_entropy(&sigma)?;

        for variant in [Variant::New, Variant::Old] {
            for use_offset in [false, true] {
                let offset_state = use_offset.then_some(&rho);
                let bound = entropy_bound(&spec, energy, eps, variant, offset_state)?;
                reports.push(BoundReport::with_lhs(
                    BoundFamily::EntropyEnergy,
                    ReportInputs {
                        eps,
                        eps_target: Some(eps_target),
                        energy: Some(energy),
                        spectrum: Some(spec.describe()),
                        dims: vec![d],
                        seed: cfg.seed,
                        trial: Some(trial),
                        variant: Some(variant),
                        use_offset: Some(use_offset),
                        rank: None,
                    },
                    bound.value,
                    lhs,
                ));
            }
        }
    }
    Ok(reports)
}

/// Geometric-profile joint distribution with `E(X1) <= e_max`, by rejection.
fn sample_mean_bounded_joint(
    rng_: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    e_max: f64,
) -> Result<JointDistribution> {
    for _ in 0..SAMPLER_ATTEMPTS {
        // decay rate scaled around the value that matches the mean budget
        let kappa0 = (1.0 + 1.0 / e_max).ln();
        let kappa = kappa0 * (0.5 + 1.5 * rng_.random::<f64>());
        let mut w = vec![0.0; rows * cols];
        for i in 0..rows {
            let profile = (-kappa * i as f64).exp();
            for j in 0..cols {
                w[i * cols + j] = profile * rng::exponential(rng_);
            }
        }
        let sum: f64 = w.iter().sum();
        for x in &mut w {
            *x /= sum;
        }
        let p = JointDistribution::new(rows, cols, w)?;
        if mean_value_x1(&p) <= e_max {
            return Ok(p);
        }
    }
    // all mass on the zero value: mean 0
    let mut w = vec![0.0; rows * cols];
    let row0 = rng::dirichlet(rng_, cols);
    w[..cols].copy_from_slice(&row0);
    JointDistribution::new(rows, cols, w)
}

/// Equivocation campaign: random mean-bounded joints, TV perturbations,
/// zero violations expected.
pub fn verify_equivocation(cfg: &CampaignConfig) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    if cfg.dims.len() != 2 {
        return Err(Error::InvalidConfig {
            reason: "equivocation campaigns need dims = [max_rows, max_cols]".into(),
        });
    }
    let (max_rows, max_cols) = (cfg.dims[0], cfg.dims[1]);
    if max_rows < 2 {
        return Err(Error::InvalidConfig {
            reason: "equivocation needs at least two rows".into(),
        });
    }
    let mut reports = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let mut rng_ = rng::trial(cfg.seed, trial);
        let ne = cfg.energy_grid.len() as u64;
        let neps = cfg.eps_grid.len() as u64;
        let energy = cfg.energy_grid[(trial % ne) as usize];
        let eps_target = cfg.eps_grid[((trial / ne) % neps) as usize];

        let rows = rng_.random_range(2..=max_rows);
        let cols = rng_.random_range(1..=max_cols);
        let p = sample_mean_bounded_joint(&mut rng_, rows, cols, energy)?;

        // TV-perturbation toward an unconstrained random joint
        let u = {
            let w = rng::dirichlet(&mut rng_, rows * cols);
            JointDistribution::new(rows, cols, w)?
        };
        let reach = tv_distance(&p, &u);
        let t = if reach > 0.0 {
            (0.95 * eps_target / reach).min(1.0)
        } else {
            0.0
        };
        let q = {
            let w: Vec<f64> = p
                .weights()
                .iter()
                .zip(u.weights())
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            JointDistribution::new(rows, cols, w)?
        };
        let eps = tv_distance(&p, &q);
        let lhs = conditional_entropy(&p) - conditional_entropy(&q);
        let bound = equivocation_bound(energy, eps)?;
        reports.push(BoundReport::with_lhs(
            BoundFamily::Equivocation,
            ReportInputs {
                eps,
                eps_target: Some(eps_target),
                energy: Some(energy),
                spectrum: None,
                dims: vec![rows, cols],
                seed: cfg.seed,
                trial: Some(trial),
                variant: None,
                use_offset: None,
                rank: None,
            },
            bound,
            lhs,
        ));
    }
    Ok(reports)
}

/// EoF campaign. With `dims = [2, 2]` the lhs uses the exact concurrence
/// oracle and violations are meaningful; for other small dimensions the lhs
/// is a difference of one-sided upper bounds and every report is flagged
/// estimate-only (a difference of upper bounds cannot witness a violation).
pub fn verify_eof(cfg: &CampaignConfig) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    if cfg.dims.len() != 2 {
        return Err(Error::InvalidConfig {
            reason: "eof campaigns need dims = [dim_a, dim_b]".into(),
        });
    }
    let (da, db) = (cfg.dims[0], cfg.dims[1]);
    let d = da * db;
    let exact = da == 2 && db == 2;
    let mut reports = Vec::with_capacity(cfg.trials as usize * 2);
    for trial in 0..cfg.trials {
        let mut rng_ = rng::trial(cfg.seed, trial);
        let neps = cfg.eps_grid.len() as u64;
        let eps_target = cfg.eps_grid[(trial % neps) as usize];

        let (rho_full, sigma_full) = draw_perturbed_pair(&mut rng_, eps_target, |r| {
            let rank = r.random_range(1..=d);
            random_density_rng(r, d, rank)
        })?;
        let eps = trace_distance(&rho_full, &sigma_full)?;
        let rho = BipartiteDensityMatrix::new(da, db, rho_full)?;
        let sigma = BipartiteDensityMatrix::new(da, db, sigma_full)?;

        let (lhs, estimate) = if exact {
            (
                eof_two_qubit_oracle(&rho)? - eof_two_qubit_oracle(&sigma)?,
                false,
            )
        } else {
            let up_rho = eof_upper(&rho, d, 8, cfg.seed ^ trial)?;
            let up_sigma = eof_upper(&sigma, d, 8, cfg.seed ^ trial ^ 0x5eed)?;
            (up_rho.value - up_sigma.value, true)
        };

        let reduced = partial_trace(&rho, Subsystem::A);
        let (rank_a, _) = numerical_rank(&reduced.eigenvalues()?);

        let spec_a = cfg.spectrum.build(da, &mut rng_)?;
        let h_a = spec_a.diagonal_hamiltonian(da)?;
        let energy_a = h_a.trace_product(&reduced.to_hermitian())?.max(1e-12);

        let mk_inputs = |energy: Option<f64>, rank: Option<usize>| ReportInputs {
            eps,
            eps_target: Some(eps_target),
            energy,
            spectrum: energy.map(|_| spec_a.describe()),
            dims: vec![da, db],
            seed: cfg.seed,
            trial: Some(trial),
            variant: None,
            use_offset: None,
            rank,
        };

        let rank_bound = eof_bound_rank(rank_a, eps)?;
        let mut r1 = BoundReport::with_lhs(
            BoundFamily::EofRank,
            mk_inputs(None, Some(rank_a)),
            rank_bound,
            lhs,
        );
        let energy_bound = eof_bound_energy(&spec_a, energy_a, eps.max(f64::MIN_POSITIVE))?;
        let mut r2 = BoundReport::with_lhs(
            BoundFamily::EofEnergy,
            mk_inputs(Some(energy_a), None),
            energy_bound,
            lhs,
        );
        if estimate {
            r1 = r1.estimate_only();
            r2 = r2.estimate_only();
        }
        reports.push(r1);
        reports.push(r2);
    }
    Ok(reports)
}

/// One member of the tightness-probe family for the equivocation bound.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub eps: f64,
    /// `two-point`: mass `eps` on the single value `floor(E/eps)`;
    /// `uniform-tail`: mass `eps` spread over values `1..=K`.
    pub family: &'static str,
    /// Top value (two-point) or tail width (uniform-tail).
    pub k: usize,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    /// The bound with `g` in the first term swapped for the capped binary
    /// entropy. Not a valid bound; the probe demonstrates that.
    pub swapped_bound: f64,
    pub swapped_violation: bool,
}

/// The capped binary entropy extended beyond 1, for the swapped-term probe.
fn h2_capped_ext(x: f64) -> f64 {
    if x <= 0.5 {
        h2_unit(x)
    } else {
        std::f64::consts::LN_2
    }
}

/// Parametric family probing how tight the equivocation bound is, and why
/// its first term must keep `g`: distributions concentrating mass `eps` at
/// high values drive the lhs like `eps ln(E/eps)`, which the capped binary
/// entropy cannot absorb. Exploratory output; the swapped-term violations
/// are the only hard claim.
pub fn equivocation_tightness_probe(energy: f64, eps_grid: &[f64]) -> Result<Vec<ProbeRow>> {
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    let mut rows = Vec::new();
    for &eps in eps_grid {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::DomainViolation {
                what: "eps",
                value: eps,
            });
        }
        let bound = equivocation_bound(energy, eps)?;
        let swapped = eps * h2_capped_ext(energy / eps) + h2_tilde(eps)?;
        let point_at_zero = |k: usize, tail: &[f64]| -> Result<JointDistribution> {
            let mut w = vec![0.0; k + 1];
            w[0] = 1.0 - eps;
            w[1..].copy_from_slice(tail);
            JointDistribution::new(k + 1, 1, w)
        };

        // two-point member: all perturbed mass on value k = floor(E/eps)
        let k = ((energy / eps).floor() as usize).max(1);
        if eps * k as f64 <= energy {
            let mut tail = vec![0.0; k];
            tail[k - 1] = eps;
            let p = point_at_zero(k, &tail)?;
            let lhs = conditional_entropy(&p); // q is the point mass at 0
            rows.push(ProbeRow {
                eps,
                family: "two-point",
                k,
                lhs,
                bound,
                ratio: lhs / bound,
                swapped_bound: swapped,
                swapped_violation: lhs > swapped + 1e-9,
            });
        }

        // uniform-tail member: mass eps spread over 1..=K, K ~ 2E/eps
        let k_tail = ((2.0 * energy / eps - 1.0).floor() as usize).max(1);
        if eps * (k_tail as f64 + 1.0) / 2.0 <= energy {
            let tail = vec![eps / k_tail as f64; k_tail];
            let p = point_at_zero(k_tail, &tail)?;
            let lhs = conditional_entropy(&p);
            rows.push(ProbeRow {
                eps,
                family: "uniform-tail",
                k: k_tail,
                lhs,
                bound,
                ratio: lhs / bound,
                swapped_bound: swapped,
                swapped_violation: lhs > swapped + 1e-9,
            });
        }
    }
    Ok(rows)
}

/// `g` is needed in the equivocation bound: true iff the probe family
/// exhibits at least one violation of the swapped bound (an inconclusive
/// sweep returns false rather than failing).
pub fn swapped_term_violates(energy: f64, eps_grid: &[f64]) -> Result<bool> {
    Ok(equivocation_tightness_probe(energy, eps_grid)?
        .iter()
        .any(|r| r.swapped_violation))
}
