//! Dense complex matrix helpers and the Hermitian eigensolver.
//!
//! Matrices are `Vec<Complex64>` in row-major order with an explicit
//! dimension; everything spectral routes through [`jacobi_hermitian`], a
//! cyclic Jacobi iteration specialized to complex Hermitian input. For the
//! small dimensions this crate works at (d <= 64) Jacobi is essentially
//! backward-stable to machine precision and fully deterministic, which is
//! what the reconstruction tolerances in [`crate::tol`] assume.

use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) const MAX_JACOBI_SWEEPS: usize = 60;

#[inline]
pub(crate) fn at(a: &[Complex64], n: usize, i: usize, j: usize) -> Complex64 {
    a[i * n + j]
}

pub(crate) fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::ONE;
    }
    m
}

pub(crate) fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub(crate) fn trace(a: &[Complex64], n: usize) -> Complex64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_of_product(a: &[Complex64], b: &[Complex64], n: usize) -> Complex64 {
    let mut t = Complex64::ZERO;
    for i in 0..n {
        for k in 0..n {
            t += a[i * n + k] * b[k * n + i];
        }
    }
    t
}

pub(crate) fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max entrywise deviation from `a = a†`.
pub(crate) fn hermiticity_deviation(a: &[Complex64], n: usize) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[i * n + j] - a[j * n + i].conj()).norm());
        }
    }
    dev
}

/// Overwrite `a` with `(a + a†)/2`, scrubbing roundoff asymmetry from
/// products of Hermitian factors.
pub(crate) fn symmetrize(a: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i].conj());
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
        let d = a[i * n + i].re;
        a[i * n + i] = Complex64::new(d, 0.0);
    }
}

fn frobenius_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

fn off_diagonal_sq(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i * n + j].norm_sqr();
        }
    }
    2.0 * s
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.
///
/// Returns eigenvalues sorted ascending and, when requested, the matching
/// eigenvectors stored column-major (column `j` of the result, i.e. the
/// contiguous slice `v[j*n..(j+1)*n]`, is the eigenvector of `values[j]`).
///
/// The caller is responsible for Hermiticity; only the upper triangle and
/// real diagonal parts drive the rotations.
pub(crate) fn jacobi_hermitian(
    a: &[Complex64],
    n: usize,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<Complex64>>)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(Vec::new)));
    }
    if n == 1 {
        return Ok((vec![a[0].re], want_vectors.then(|| vec![Complex64::ONE])));
    }

    let mut m = a.to_vec();
    let mut v = want_vectors.then(|| identity(n));
    let stop_sq = {
        let scale = frobenius_sq(&m).max(1.0);
        1e-28 * scale
    };

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_sq(&m, n) <= stop_sq {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cp = phase.conj();

                // M <- G† M (rows p, q).
                for j in 0..n {
                    let mpj = m[p * n + j];
                    let mqj = m[q * n + j];
                    m[p * n + j] = c * mpj - s * phase * mqj;
                    m[q * n + j] = s * mpj + c * phase * mqj;
                }
                // M <- M G (columns p, q).
                for i in 0..n {
                    let mip = m[i * n + p];
                    let miq = m[i * n + q];
                    m[i * n + p] = c * mip - s * cp * miq;
                    m[i * n + q] = s * mip + c * cp * miq;
                }
                // The 2x2 block is known analytically; overwrite to kill
                // rounding drift.
                m[p * n + p] = Complex64::new(app - t * r, 0.0);
                m[q * n + q] = Complex64::new(aqq + t * r, 0.0);
                m[p * n + q] = Complex64::ZERO;
                m[q * n + p] = Complex64::ZERO;

                if let Some(v) = v.as_mut() {
                    // V <- V G, columns stored contiguously.
                    let (head, tail) = v.split_at_mut(q * n);
                    let vp = &mut head[p * n..p * n + n];
                    let vq = &mut tail[..n];
                    for i in 0..n {
                        let vip = vp[i];
                        let viq = vq[i];
                        vp[i] = c * vip - s * cp * viq;
                        vq[i] = s * vip + c * cp * viq;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_sq(&m, n) > stop_sq {
        return Err(Error::ConvergenceFailure {
            what: format!(
                "Jacobi eigensolver did not converge in {MAX_JACOBI_SWEEPS} sweeps (n = {n})"
            ),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));

    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = Vec::with_capacity(n * n);
        for &j in &order {
            sorted.extend_from_slice(&v[j * n..(j + 1) * n]);
        }
        sorted
    });
    Ok((values, vectors))
}

/// Assemble `sum_j f(lambda_j) v_j v_j†` from an eigensystem
/// (`vectors` column-major as produced by [`jacobi_hermitian`]).
pub(crate) fn assemble_spectral(
    values: &[f64],
    vectors: &[Complex64],
    n: usize,
    f: impl Fn(f64) -> f64,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for (j, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let col = &vectors[j * n..(j + 1) * n];
        for i in 0..n {
            let wi = w * col[i];
            for k in 0..n {
                out[i * n + k] += wi * col[k].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_hermitian(n: usize, seed: u64) -> Vec<Complex64> {
        let mut r = rng::seeded(seed);
        let g: Vec<Complex64> = (0..n * n).map(|_| rng::complex_gaussian(&mut r)).collect();
        let mut m = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = 0.5 * (g[i * n + j] + g[j * n + i].conj());
            }
        }
        m
    }

    #[test]
    fn pauli_x_eigensystem() {
        let x = vec![
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        ];
        let (vals, vecs) = jacobi_hermitian(&x, 2, true).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        let rec = assemble_spectral(&vals, vecs.as_ref().unwrap(), 2, |x| x);
        assert!(max_abs_diff(&rec, &x) < 1e-14);
    }

    #[test]
    fn pauli_y_eigensystem() {
        let y = vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ];
        let (vals, vecs) = jacobi_hermitian(&y, 2, true).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        let rec = assemble_spectral(&vals, vecs.as_ref().unwrap(), 2, |x| x);
        assert!(max_abs_diff(&rec, &y) < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        for n in [2usize, 3, 5, 8, 13, 16] {
            let m = random_hermitian(n, 40 + n as u64);
            let (vals, vecs) = jacobi_hermitian(&m, n, true).unwrap();
            let v = vecs.unwrap();
            let rec = assemble_spectral(&vals, &v, n, |x| x);
            assert!(
                max_abs_diff(&rec, &m) < 1e-11,
                "reconstruction failed at n = {n}"
            );
            // columns orthonormal
            for a in 0..n {
                for b in 0..n {
                    let dot: Complex64 = (0..n).map(|i| v[a * n + i].conj() * v[b * n + i]).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (dot - expect).norm() < 1e-11,
                        "orthonormality failed at n = {n} ({a},{b})"
                    );
                }
            }
            // ascending order
            for w in vals.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn values_only_matches_full_solve() {
        let m = random_hermitian(9, 99);
        let (v1, _) = jacobi_hermitian(&m, 9, false).unwrap();
        let (v2, _) = jacobi_hermitian(&m, 9, true).unwrap();
        for (a, b) in v1.iter().zip(&v2) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
