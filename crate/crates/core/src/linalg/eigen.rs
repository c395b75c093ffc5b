use num_complex::Complex64;

use crate::linalg::lu::ComplexLu;
use crate::matrix::{CMatrix, ComplexScalar, Matrix};
use crate::policy::EPS;

const INVERSE_ITERATIONS: usize = 3;

/// Condition numbers `||x|| ||y|| / |y^H x|` of computed eigenvalues, with
/// right (`x`) and left (`y`) eigenvectors found by inverse iteration at each
/// eigenvalue.
///
/// Exactly defective eigenvalues give `y^H x = 0`; those report `f64::INFINITY`.
pub fn eigenvalue_conditions(a: &Matrix, eigs: &[ComplexScalar]) -> Vec<f64> {
    let n = a.rows();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let floor = EPS * scale;
    eigs.iter()
        .map(|&lambda| {
            let m = CMatrix::shifted_real(a, lambda);
            let x = inverse_iterate(&m, floor, n);
            let y = inverse_iterate(&m.conj_transpose(), floor, n);
            let overlap: Complex64 = y.iter().zip(&x).map(|(yi, xi)| yi.conj() * xi).sum();
            let o = overlap.norm();
            if o == 0.0 {
                f64::INFINITY
            } else {
                (1.0 / o).max(1.0)
            }
        })
        .collect()
}

fn inverse_iterate(m: &CMatrix, floor: f64, n: usize) -> Vec<Complex64> {
    let lu = ComplexLu::new(m, floor);
    // Fixed, irregular start so no structured eigenvector is orthogonal to it.
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_895;
            Complex64::new(1.0 + t.fract(), 0.5 - (t * 1.7).fract())
        })
        .collect();
    normalize(&mut x);
    for _ in 0..INVERSE_ITERATIONS {
        x = lu.solve_vec(&x);
        if !normalize(&mut x) {
            break;
        }
    }
    x
}

fn normalize(x: &mut [Complex64]) -> bool {
    let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm.is_finite() && nrm > 0.0 {
        x.iter_mut().for_each(|z| *z /= nrm);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schur::eigenvalues;

    #[test]
    fn normal_matrix_is_perfectly_conditioned() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let ev = eigenvalues(&a).unwrap();
        for k in eigenvalue_conditions(&a, &ev) {
            assert!((k - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn near_defective_pair_is_ill_conditioned() {
        let d = 1e-6;
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0 + d]]).unwrap();
        let ev = eigenvalues(&a).unwrap();
        let expected = (1.0 + 1.0 / (d * d)).sqrt();
        for k in eigenvalue_conditions(&a, &ev) {
            assert!((k / expected - 1.0).abs() < 1e-3, "{k} vs {expected}");
        }
    }

    #[test]
    fn exact_jordan_block_is_infinitely_conditioned() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let ev = eigenvalues(&a).unwrap();
        for k in eigenvalue_conditions(&a, &ev) {
            assert!(k > 1e12);
        }
    }
}
