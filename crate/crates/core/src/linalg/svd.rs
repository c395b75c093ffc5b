//! One-sided (Hestenes) Jacobi SVD for real and complex matrices.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::policy::EPS;

const MAX_SWEEPS: usize = 80;

/// Singular values, non-increasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SingularValues(Vec<f64>);

impl SingularValues {
    pub(crate) fn from_unsorted(mut v: Vec<f64>) -> Self {
        v.sort_by(|a, b| b.total_cmp(a));
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_above(&self, tol: f64) -> usize {
        self.0.iter().filter(|&&s| s > tol).count()
    }
}

/// Singular values of `a`, length `min(rows, cols)`.
pub fn singular_values(a: &Matrix) -> Result<SingularValues> {
    let work = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    Ok(SingularValues::from_unsorted(jacobi_real(&work)?))
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    Ok(singular_values(a)?.largest())
}

/// Right singular vectors of a square or tall complex matrix, paired with
/// their singular values and sorted by increasing singular value.
pub(crate) fn complex_right_singular(a: &CMatrix) -> Result<Vec<(f64, Vec<Complex64>)>> {
    assert!(a.rows() >= a.cols(), "complex SVD expects rows >= cols");
    let m = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = EPS * m as f64;
    let negligible = noise_floor(cols.iter().flatten().map(|z| z.norm_sqr()).sum());

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the cross term is real.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for vecs in [&mut cols, &mut v] {
                    let (left, right) = vecs.split_at_mut(q);
                    let (cp, cq) = (&mut left[p], &mut right[0]);
                    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
                        let yq = *xq * phase;
                        let yp = *xp;
                        *xp = yp * c - yq * s;
                        *xq = yp * s + yq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            routine: "complex jacobi svd",
            iterations: MAX_SWEEPS,
            partial: None,
        });
    }
    let mut out: Vec<(f64, Vec<Complex64>)> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .zip(v)
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// One-sided Jacobi on the columns of a square or tall `a`. Returns
/// unsorted singular values.
fn jacobi_real(a: &Matrix) -> Result<Vec<f64>> {
    let m = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let tol = EPS * m as f64;
    let negligible = noise_floor(a.data().iter().map(|x| x * x).sum());

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = cols[p].iter().zip(&cols[q]).fold(
                    (0.0, 0.0, 0.0),
                    |(a, b, g), (&x, &y)| (a + x * x, b + y * y, g + x * y),
                );
                if gamma == 0.0
                    || gamma.abs() <= tol * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            routine: "jacobi svd",
            iterations: MAX_SWEEPS,
            partial: None,
        });
    }
    Ok(cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect())
}

/// Squared column norm below which a column is rounding noise, far under any
/// rank threshold (`1e-2 * eps * ||A||_F`).
fn noise_floor(frob_sq: f64) -> f64 {
    let f = 1e-2 * EPS;
    f * f * frob_sq
}

#[inline]
fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (yp, yq) = (*xp, *xq);
        *xp = c * yp - s * yq;
        *xq = s * yp + c * yq;
    }
}
