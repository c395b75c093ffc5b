//! Dense real-matrix kernels: Hessenberg reduction, real Schur form,
//! singular values, numerical rank, shifted null spaces, determinant and
//! linear solves.

mod eigen;
mod hessenberg;
mod lu;
mod rank;
mod schur;
mod svd;

pub use eigen::eigenvalue_conditions;
pub use hessenberg::hessenberg;
pub use lu::{determinant, solve};
pub use rank::{null_space_dim, numerical_rank, RankReport};
pub use schur::{default_max_iterations, eigenvalues, real_schur, SchurForm};
pub use svd::{singular_values, spectral_norm, SingularValues};

pub(crate) use lu::ComplexLu;
pub(crate) use rank::{geometric_floor, null_space_within};
pub(crate) use svd::complex_right_singular;

#[cfg(test)]
pub(crate) mod test_util {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::matrix::Matrix;

    /// Entries uniform in [-1, 1].
    pub fn random_matrix(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Matrix::new(n, n, data).unwrap()
    }

    /// `||a - q h q^T||_F / max(1, ||a||_F)`.
    pub fn reconstruction_residual(a: &Matrix, q: &Matrix, h: &Matrix) -> f64 {
        let back = q.matmul(h).unwrap().matmul(&q.transpose()).unwrap();
        a.sub(&back).unwrap().frobenius_norm() / a.frobenius_norm().max(1.0)
    }
}
