use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::hessenberg::hessenberg;
use crate::matrix::{ComplexScalar, Matrix};
use crate::policy::EPS;

/// Real Schur form `a = z t z^T`.
///
/// `t` is quasi-upper-triangular: real eigenvalues sit in 1x1 diagonal blocks
/// and each complex-conjugate pair in a 2x2 block whose top-left index is
/// listed in `blocks`. All other subdiagonal entries are exactly zero.
#[derive(Clone, Debug, Serialize)]
pub struct SchurForm {
    pub t: Matrix,
    pub z: Matrix,
    pub blocks: Vec<usize>,
    pub iterations_used: usize,
}

impl SchurForm {
    /// Eigenvalues in diagonal order; conjugate pairs appear as `(+im, -im)`.
    pub fn eigenvalues(&self) -> Vec<ComplexScalar> {
        let t = &self.t;
        let n = t.rows();
        let mut out = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if self.blocks.binary_search(&i).is_ok() {
                let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                let p = 0.5 * (a - d);
                let disc = p * p + b * c;
                let re = 0.5 * (a + d);
                if disc < 0.0 {
                    let im = (-disc).sqrt();
                    out.push(ComplexScalar::new(re, im));
                    out.push(ComplexScalar::new(re, -im));
                } else {
                    // Only reachable for hand-built forms; standardized blocks are complex.
                    let s = disc.sqrt();
                    out.push(ComplexScalar::new(re + s, 0.0));
                    out.push(ComplexScalar::new(re - s, 0.0));
                }
                i += 2;
            } else {
                out.push(ComplexScalar::new(t[(i, i)], 0.0));
                i += 1;
            }
        }
        out
    }
}

pub fn default_max_iterations(n: usize) -> usize {
    30 * n.max(1)
}

/// Real Schur decomposition by Hessenberg reduction followed by Francis
/// double-shift QR with deflation, after the EISPACK `hqr2` procedure.
///
/// `max_iterations` caps the total number of QR sweeps.
pub fn real_schur(a: &Matrix, max_iterations: usize) -> Result<SchurForm> {
    let nn = a.require_square("real_schur")?;
    if max_iterations == 0 {
        return Err(Error::Dimension("max_iterations must be at least 1".into()));
    }
    let (mut h, mut v) = hessenberg(a)?;
    let norm: f64 = (0..nn)
        .flat_map(|i| (i.saturating_sub(1)..nn).map(move |j| (i, j)))
        .map(|(i, j)| h[(i, j)].abs())
        .sum();

    let mut total = 0usize;
    let mut iter = 0usize;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut x, mut y, mut w): (f64, f64, f64);
    let mut blocks = Vec::new();
    let mut n = nn as isize - 1;

    while n >= 0 {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            let mut sc = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if sc == 0.0 {
                sc = norm;
            }
            if h[(l, l - 1)].abs() <= EPS * sc {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[(nu, nu)] += exshift;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            let m1 = nu - 1;
            w = h[(nu, m1)] * h[(m1, nu)];
            p = 0.5 * (h[(m1, m1)] - h[(nu, nu)]);
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(m1, m1)] += exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                x = h[(nu, m1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in m1..nn {
                    z = h[(m1, j)];
                    h[(m1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, m1)];
                    h[(i, m1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                for i in 0..nn {
                    z = v[(i, m1)];
                    v[(i, m1)] = q * z + p * v[(i, nu)];
                    v[(i, nu)] = q * v[(i, nu)] - p * z;
                }
                h[(nu, m1)] = 0.0;
            } else {
                blocks.push(m1);
            }
            n -= 2;
            iter = 0;
        } else {
            if total >= max_iterations {
                let partial = finish(h, v, blocks, total);
                return Err(Error::Convergence {
                    routine: "real_schur",
                    iterations: total,
                    partial: Some(Box::new(partial)),
                });
            }
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            // Wilkinson's ad hoc shift.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            // MATLAB's ad hoc shift.
            if iter == 30 {
                s = 0.5 * (y - x);
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / (0.5 * (y - x) + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < EPS * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    for i in 0..nn {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }

    Ok(finish(h, v, blocks, total))
}

fn finish(mut t: Matrix, z: Matrix, mut blocks: Vec<usize>, iterations_used: usize) -> SchurForm {
    let n = t.rows();
    blocks.sort_unstable();
    for i in 0..n {
        for j in 0..i {
            let inside_block = j + 1 == i && blocks.binary_search(&j).is_ok();
            if !inside_block {
                t[(i, j)] = 0.0;
            }
        }
    }
    SchurForm {
        t,
        z,
        blocks,
        iterations_used,
    }
}

/// Eigenvalues of a square matrix with repetition, via [`real_schur`] with
/// the default sweep cap.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<ComplexScalar>> {
    let n = a.require_square("eigenvalues")?;
    Ok(real_schur(a, default_max_iterations(n))?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::{random_matrix, reconstruction_residual};

    fn check_form(a: &Matrix, f: &SchurForm) {
        let n = a.rows();
        assert!(reconstruction_residual(a, &f.z, &f.t) <= 1e-10);
        let ztz = f.z.transpose().matmul(&f.z).unwrap();
        assert!(ztz.sub(&Matrix::identity(n)).unwrap().max_abs() <= 1e-12);
        for i in 1..n {
            if f.t[(i, i - 1)] != 0.0 {
                assert!(f.blocks.contains(&(i - 1)));
            }
        }
    }

    #[test]
    fn diagonal_input() {
        let a = Matrix::from_diag(&[3.0, -1.0]).unwrap();
        let f = real_schur(&a, 60).unwrap();
        check_form(&a, &f);
        let mut d = vec![f.t[(0, 0)], f.t[(1, 1)]];
        d.sort_by(f64::total_cmp);
        assert_eq!(d, vec![-1.0, 3.0]);
        assert_eq!(f.t[(1, 0)], 0.0);
    }

    #[test]
    fn rotation_generator_gives_complex_block() {
        let a = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let f = real_schur(&a, 60).unwrap();
        assert_eq!(f.blocks, vec![0]);
        let ev = f.eigenvalues();
        assert!((ev[0] - ComplexScalar::new(0.0, 1.0)).norm() < 1e-14);
        assert!((ev[1] - ComplexScalar::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_stays_triangular() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let f = real_schur(&a, 60).unwrap();
        assert!(f.blocks.is_empty());
        assert_eq!(f.t[(1, 0)], 0.0);
        assert_eq!((f.t[(0, 0)], f.t[(1, 1)]), (1.0, 1.0));
    }

    #[test]
    fn worked_two_by_two_spectra() {
        let cases: [([[f64; 2]; 2], [f64; 2]); 3] = [
            ([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0]),
            ([[0.0, 1.0], [0.0, 0.0]], [0.0, 0.0]),
            ([[1.0, 0.0], [0.0, 0.0]], [0.0, 1.0]),
        ];
        for (rows, expected) in cases {
            let a = Matrix::from_rows(&rows).unwrap();
            let mut ev: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|z| z.re).collect();
            ev.sort_by(f64::total_cmp);
            assert_eq!(ev, expected.to_vec());
        }
    }

    #[test]
    fn random_reconstruction() {
        for (n, seed) in [(2, 1), (5, 2), (13, 3), (40, 4)] {
            let a = random_matrix(n, seed);
            let f = real_schur(&a, default_max_iterations(n)).unwrap();
            check_form(&a, &f);
        }
    }

    #[test]
    fn convergence_error_keeps_partial_form() {
        let a = random_matrix(8, 5);
        match real_schur(&a, 1) {
            Err(Error::Convergence { partial, iterations, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(partial.unwrap().t.rows(), 8);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
