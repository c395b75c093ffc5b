use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::rank::numerical_rank;
use crate::matrix::{CMatrix, Matrix};
use crate::policy::TolerancePolicy;

/// Packed LU factors with partial pivoting, `P a = L U`.
struct RealLu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl RealLu {
    fn new(a: &Matrix) -> Self {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Self { lu, perm, sign }
    }

    fn det(&self) -> f64 {
        (0..self.lu.rows()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

/// Determinant via LU with partial pivoting.
pub fn determinant(a: &Matrix) -> Result<f64> {
    a.require_square("determinant")?;
    Ok(RealLu::new(a).det())
}

/// Solves `a x = b` for every column of `b`.
///
/// `a` must be numerically nonsingular under the default rank tolerance;
/// otherwise [`Error::Singular`] is returned.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.require_square("solve")?;
    if b.rows() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, expected {n}",
            b.rows()
        )));
    }
    let rank = numerical_rank(a, &TolerancePolicy::default())?;
    if rank.rank < n {
        return Err(Error::Singular { rank: rank.rank, n });
    }
    let lu = RealLu::new(a);
    let mut x = Matrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        let col = lu.solve_vec(&b.column(j));
        for (i, v) in col.into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    Ok(x)
}

/// Complex LU with partial pivoting. Zero or tiny pivots can be replaced by a
/// floor so the factorization is usable for inverse iteration on singular shifts.
pub(crate) struct ComplexLu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl ComplexLu {
    pub(crate) fn new(a: &CMatrix, pivot_floor: f64) -> Self {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            if lu[(k, k)].norm() <= pivot_floor {
                if pivot_floor == 0.0 {
                    continue;
                }
                lu[(k, k)] = Complex64::new(pivot_floor, 0.0);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Self { lu, perm, sign }
    }

    pub(crate) fn det(&self) -> Complex64 {
        (0..self.lu.rows()).fold(Complex64::new(self.sign, 0.0), |d, i| d * self.lu[(i, i)])
    }

    pub(crate) fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::random_matrix;

    #[test]
    fn determinants() {
        for n in 1..6 {
            assert_eq!(determinant(&Matrix::identity(n)).unwrap(), 1.0);
        }
        let j = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(determinant(&j).unwrap(), 1.0);
        let nil = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(determinant(&nil).unwrap(), 0.0);
        let swap = Matrix::from_rows(&[[0.0, 2.0], [3.0, 0.0]]).unwrap();
        assert_eq!(determinant(&swap).unwrap(), -6.0);
    }

    #[test]
    fn solves() {
        let b = Matrix::from_rows(&[[1.5, -2.0], [3.0, 0.25]]).unwrap();
        assert_eq!(solve(&Matrix::identity(2), &b).unwrap(), b);
        let d = Matrix::from_diag(&[2.0, 4.0]).unwrap();
        let x = solve(&d, &Matrix::from_rows(&[[2.0], [8.0]]).unwrap()).unwrap();
        assert_eq!(x.column(0), vec![1.0, 2.0]);
    }

    #[test]
    fn singular_solve_is_an_error() {
        let nil = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[1.0], [1.0]]).unwrap();
        assert!(matches!(solve(&nil, &b), Err(Error::Singular { rank: 1, n: 2 })));
    }

    #[test]
    fn random_solve_residual() {
        let a = random_matrix(15, 3);
        let b = random_matrix(15, 4);
        let x = solve(&a, &b).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
        assert!(r / b.frobenius_norm().max(1.0) <= 1e-8);
    }

    #[test]
    fn complex_lu_matches_real_determinant() {
        let a = random_matrix(7, 8);
        let c = ComplexLu::new(&CMatrix::from_real(&a), 0.0).det();
        let r = determinant(&a).unwrap();
        assert!((c.re - r).abs() <= 1e-12 * r.abs().max(1.0));
        assert!(c.im.abs() <= 1e-14);
    }
}
