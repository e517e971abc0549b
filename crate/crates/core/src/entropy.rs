//! Scalar entropy functions, correction terms, and discrete joint
//! distributions. Everything is in nats.
//!
//! The two correction terms at the heart of the old-versus-new bound
//! comparison live here:
//!
//! - [`g_func`]: `g(eps) = (1 + eps) h2(eps / (1 + eps))`,
//! - [`h2_tilde`]: binary entropy on `[0, 1/2]`, frozen at `ln 2` on
//!   `[1/2, 1]`.
//!
//! `h2_tilde <= g` pointwise, strictly on `(0, 1]`; both are nondecreasing,
//! which is what lets bound evaluators treat a measured distance `<= eps` as
//! if it were exactly `eps`.

use serde::{Deserialize, Serialize};

use crate::operator::DensityMatrix;
use crate::{tol, Error, Result};

/// `0 ln 0 = 0`, eigenvalues in `[EIG_FLOOR, 0)` count as exact zeros,
/// anything lower is an error.
fn plogp(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(-x * x.ln())
    } else if x >= tol::EIG_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NegativeWeight { value: x })
    }
}

/// Shannon entropy of a weight vector (weights need not be normalized, but
/// must be nonnegative up to the eigenvalue floor).
pub fn shannon_entropy(weights: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &w in weights {
        s += plogp(w)?;
    }
    // Weights infinitesimally above 1 can leave a tiny negative residue.
    Ok(s.max(0.0))
}

/// Von Neumann entropy `S(rho) = -tr rho ln rho`, in `[0, ln dim]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    shannon_entropy(&rho.eigenvalues()?)
}

/// Binary entropy `h2(x) = -x ln x - (1-x) ln(1-x)` on `[0, 1]`.
///
/// ```
/// use sembound_core::entropy::h2;
///
/// assert!((h2(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
/// assert_eq!(h2(0.0).unwrap(), 0.0);
/// assert!(h2(1.2).is_err());
/// ```
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainViolation {
            what: "h2 argument",
            value: x,
        });
    }
    Ok(h2_unit(x))
}

/// `h2` without the domain check, for internal callers that guarantee
/// `x` in `[0, 1]`.
pub(crate) fn h2_unit(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    let a = if x > 0.0 { -x * x.ln() } else { 0.0 };
    let b = if x < 1.0 {
        -(1.0 - x) * (1.0 - x).ln()
    } else {
        0.0
    };
    a + b
}

/// Correction term `g(eps) = (1 + eps) h2(eps / (1 + eps))`, nondecreasing
/// on `[0, inf)` with `g(0) = 0`.
pub fn g_func(eps: f64) -> f64 {
    debug_assert!(eps >= 0.0);
    if eps == 0.0 {
        return 0.0;
    }
    (1.0 + eps) * h2_unit(eps / (1.0 + eps))
}

/// Correction term `h2_tilde`: `h2(eps)` for `eps <= 1/2`, `ln 2` for
/// `eps >= 1/2`. Continuous and nondecreasing on `[0, 1]`, and strictly
/// below [`g_func`] everywhere on `(0, 1]`.
///
/// ```
/// use sembound_core::entropy::{g_func, h2_tilde};
///
/// assert!((h2_tilde(0.75).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
/// assert!(h2_tilde(0.3).unwrap() < g_func(0.3));
/// ```
pub fn h2_tilde(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::DomainViolation {
            what: "h2_tilde argument",
            value: eps,
        });
    }
    Ok(if eps <= 0.5 {
        h2_unit(eps)
    } else {
        std::f64::consts::LN_2
    })
}

/// A 2-variate distribution `p[i][j]` for a pair `(X1, X2)`. Row `i`
/// (0-based) carries the value `i` of `X1`, so the first row is value 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    weights: Vec<f64>, // row-major
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || weights.len() != rows * cols {
            return Err(Error::BadShape {
                dim: rows,
                expected: rows * cols,
                got: weights.len(),
            });
        }
        if let Some(&bad) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::NegativeWeight { value: bad });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self {
            rows,
            cols,
            weights,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Marginal of `X1` (rows).
    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.weights[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .sum()
            })
            .collect()
    }

    /// Marginal of `X2` (columns).
    pub fn col_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, out) in m.iter_mut().enumerate() {
                *out += self.weights[i * self.cols + j];
            }
        }
        m
    }

    /// Joint Shannon entropy `H(X1, X2)`.
    pub fn joint_entropy(&self) -> f64 {
        shannon_entropy(&self.weights).expect("weights validated nonnegative")
    }

    /// CSV exchange format: one line `i,j,p_ij` per cell with 1-based
    /// indices; zero cells may be omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push_str(&format!("{},{},{}\n", i + 1, j + 1, w));
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut cells: Vec<(usize, usize, f64)> = Vec::new();
        let (mut rows, mut cols) = (0usize, 0usize);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let bad = || Error::InvalidConfig {
                reason: format!("joint-distribution CSV line {}: expected i,j,p", ln + 1),
            };
            let i: usize = parts
                .next()
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())?;
            let j: usize = parts
                .next()
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())?;
            let p: f64 = parts
                .next()
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())?;
            if i == 0 || j == 0 {
                return Err(bad());
            }
            rows = rows.max(i);
            cols = cols.max(j);
            cells.push((i - 1, j - 1, p));
        }
        let mut weights = vec![0.0; rows * cols];
        for (i, j, p) in cells {
            weights[i * cols + j] += p;
        }
        Self::new(rows, cols, weights)
    }
}

/// Shannon conditional entropy (equivocation)
/// `H(X1 | X2) = H(X1, X2) - H(X2) >= 0`.
pub fn conditional_entropy(p: &JointDistribution) -> f64 {
    let h2_marg = shannon_entropy(&p.col_marginal()).expect("marginal nonnegative");
    (p.joint_entropy() - h2_marg).max(0.0)
}

/// Total variation distance between two joint distributions; supports are
/// padded with zeros to a common shape.
pub fn tv_distance(p: &JointDistribution, q: &JointDistribution) -> f64 {
    let rows = p.rows.max(q.rows);
    let cols = p.cols.max(q.cols);
    let mut sum = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let a = if i < p.rows && j < p.cols {
                p.weight(i, j)
            } else {
                0.0
            };
            let b = if i < q.rows && j < q.cols {
                q.weight(i, j)
            } else {
                0.0
            };
            sum += (a - b).abs();
        }
    }
    0.5 * sum
}

/// `E(X1) = sum_{i,j} i * p[i][j]` with row `i` carrying value `i` (0-based).
pub fn mean_value_x1(p: &JointDistribution) -> f64 {
    let mut s = 0.0;
    for i in 0..p.rows {
        for j in 0..p.cols {
            s += i as f64 * p.weight(i, j);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::random_density;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn entropy_of_pure_and_mixed_states() {
        let pure = random_density(4, 1, 3).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap() < 1e-10);

        let mixed = DensityMatrix::maximally_mixed(5);
        assert!((von_neumann_entropy(&mixed).unwrap() - 5.0_f64.ln()).abs() < 1e-12);

        let diag = DensityMatrix::from_probabilities(&[0.25, 0.75]).unwrap();
        let expect = h2(0.25).unwrap();
        assert!((von_neumann_entropy(&diag).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.5623351446188083).abs() < 1e-12);
    }

    #[test]
    fn h2_reference_points() {
        assert!((h2(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(h2(0.0).unwrap(), 0.0);
        assert_eq!(h2(1.0).unwrap(), 0.0);
        // -0.1 ln 0.1 - 0.9 ln 0.9
        assert!((h2(0.1).unwrap() - 0.3250829733914482).abs() < 1e-12);
        assert!(h2(-0.01).is_err());
        assert!(h2(1.01).is_err());
    }

    #[test]
    fn g_func_reference_points() {
        assert_eq!(g_func(0.0), 0.0);
        assert!((g_func(1.0) - 2.0 * LN_2).abs() < 1e-14);
        // g(4) = 5 h2(0.8)
        assert!((g_func(4.0) - 5.0 * h2(0.8).unwrap()).abs() < 1e-14);
        assert!((g_func(4.0) - 2.5020121176909393).abs() < 1e-10);
    }

    #[test]
    fn h2_tilde_branches() {
        assert!((h2_tilde(0.25).unwrap() - h2(0.25).unwrap()).abs() < 1e-15);
        assert!((h2_tilde(0.75).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(h2_tilde(0.0).unwrap(), 0.0);
        assert!((h2_tilde(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert!(h2_tilde(1.5).is_err());
    }

    #[test]
    fn improvement_property_on_grid() {
        // h2_tilde <= g everywhere, strict on (0, 1]
        for k in 1..=1000 {
            let eps = k as f64 / 1000.0;
            let new = h2_tilde(eps).unwrap();
            let old = g_func(eps);
            assert!(new < old, "no strict improvement at eps = {eps}");
        }
    }

    #[test]
    fn corrections_nondecreasing_on_grid() {
        let mut prev_g = 0.0;
        let mut prev_h = 0.0;
        for k in 1..=1000 {
            let eps = k as f64 / 1000.0;
            let g = g_func(eps);
            let h = h2_tilde(eps).unwrap();
            assert!(g >= prev_g - 1e-15);
            assert!(h >= prev_h - 1e-15);
            prev_g = g;
            prev_h = h;
        }
    }

    #[test]
    fn eps_g_of_e_over_eps_is_nondecreasing() {
        // underlies treating a measured distance <= eps as exactly eps
        for &e in &[0.5, 1.0, 3.0, 10.0] {
            let mut prev = 0.0;
            for k in 1..=500 {
                let eps = k as f64 / 500.0;
                let val = eps * g_func(e / eps);
                assert!(val >= prev - 1e-12, "E = {e}, eps = {eps}");
                prev = val;
            }
        }
    }

    #[test]
    fn von_neumann_entropy_is_concave() {
        for seed in 0..50 {
            let a = random_density(4, 4, 2 * seed).unwrap();
            let b = random_density(4, 2, 2 * seed + 1).unwrap();
            let mixv = a.mix(&b, 0.5).unwrap();
            let s_mix = von_neumann_entropy(&mixv).unwrap();
            let avg =
                0.5 * von_neumann_entropy(&a).unwrap() + 0.5 * von_neumann_entropy(&b).unwrap();
            assert!(s_mix >= avg - 1e-10);
        }
    }

    #[test]
    fn conditional_entropy_examples() {
        // independent uniform X1 over {0,1}
        let p = JointDistribution::new(2, 2, vec![0.25; 4]).unwrap();
        assert!((conditional_entropy(&p) - LN_2).abs() < 1e-12);

        // deterministic coupling X1 = X2
        let p = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(conditional_entropy(&p) < 1e-12);

        // worked 2x2 example
        let p = JointDistribution::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let expect = shannon_entropy(&[0.4, 0.1, 0.1, 0.4]).unwrap() - LN_2;
        assert!((conditional_entropy(&p) - expect).abs() < 1e-12);
        assert!((conditional_entropy(&p) - 0.5004024235381879).abs() < 1e-10);
    }

    #[test]
    fn tv_distance_examples() {
        let p = JointDistribution::new(2, 1, vec![0.5, 0.5]).unwrap();
        assert_eq!(tv_distance(&p, &p), 0.0);

        let q = JointDistribution::new(2, 1, vec![0.3, 0.7]).unwrap();
        assert!((tv_distance(&p, &q) - 0.2).abs() < 1e-15);

        let a = JointDistribution::new(1, 1, vec![1.0]).unwrap();
        let b = JointDistribution::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!((tv_distance(&a, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mean_value_examples() {
        let p = JointDistribution::new(1, 3, vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(mean_value_x1(&p), 0.0);

        let p = JointDistribution::new(2, 1, vec![0.5, 0.5]).unwrap();
        assert!((mean_value_x1(&p) - 0.5).abs() < 1e-15);

        let p = JointDistribution::new(3, 1, vec![0.5, 0.25, 0.25]).unwrap();
        assert!((mean_value_x1(&p) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let p = JointDistribution::new(2, 3, vec![0.1, 0.0, 0.2, 0.3, 0.4, 0.0]).unwrap();
        let text = p.to_csv();
        let q = JointDistribution::from_csv(&text).unwrap();
        assert_eq!(p.rows(), q.rows());
        assert_eq!(p.cols(), q.cols());
        assert!(tv_distance(&p, &q) < 1e-15);
    }

    proptest! {
        #[test]
        fn h2_is_symmetric(x in 0.0..=1.0f64) {
            let a = h2(x).unwrap();
            let b = h2(1.0 - x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn h2_tilde_never_exceeds_g(eps in 0.0..=1.0f64) {
            prop_assert!(h2_tilde(eps).unwrap() <= g_func(eps) + 1e-15);
        }

        #[test]
        fn tv_distance_is_within_unit_interval(
            w in prop::collection::vec(0.0..1.0f64, 6),
            v in prop::collection::vec(0.0..1.0f64, 6),
        ) {
            let norm = |mut x: Vec<f64>| {
                let s: f64 = x.iter().sum::<f64>().max(1e-12);
                for t in &mut x { *t /= s; }
                x
            };
            let p = JointDistribution::new(2, 3, norm(w)).unwrap();
            let q = JointDistribution::new(3, 2, norm(v)).unwrap();
            let d = tv_distance(&p, &q);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
        }
    }
}
