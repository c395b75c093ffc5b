use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::svd::{complex_right_singular, singular_values, SingularValues};
use crate::matrix::{CMatrix, ComplexScalar, Matrix};
use crate::policy::{TolerancePolicy, EPS};

/// Numerical rank of a matrix together with the evidence behind it.
///
/// `rank + nullity` equals the column count; for square input that is the
/// rank-nullity identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub nullity: usize,
    pub tolerance_used: f64,
    pub singular_values: SingularValues,
}

/// Counts singular values strictly above the policy's rank threshold
/// (default `max(m, n) * eps * sigma_1`).
pub fn numerical_rank(a: &Matrix, policy: &TolerancePolicy) -> Result<RankReport> {
    let sv = singular_values(a)?;
    let tol = policy.rank_tolerance(a.rows(), a.cols(), sv.largest())?;
    let rank = sv.count_above(tol);
    Ok(RankReport {
        rank,
        nullity: a.cols() - rank,
        tolerance_used: tol,
        singular_values: sv,
    })
}

/// Dimension of the null space of `a - shift * I` under the policy's rank
/// threshold, evaluated on the shifted matrix.
pub fn null_space_dim(a: &Matrix, shift: ComplexScalar, policy: &TolerancePolicy) -> Result<usize> {
    let n = a.require_square("null_space_dim")?;
    let sv = shifted_singular(a, shift)?;
    let sigma1 = sv.last().map_or(0.0, |s| s.0);
    let tol = policy.rank_tolerance(n, n, sigma1)?;
    Ok(sv.iter().filter(|(s, _)| *s <= tol).count())
}

/// Orthonormal null-space basis of `a - shift * I`, counting singular values
/// at or below `max(rank threshold, floor)`.
///
/// `floor` lets callers widen the threshold to the uncertainty of an
/// approximate eigenvalue: if the shift is within `floor` of a true
/// eigenvalue, the corresponding singular values move by at most `floor`.
pub(crate) fn null_space_within(
    a: &Matrix,
    shift: ComplexScalar,
    floor: f64,
    policy: &TolerancePolicy,
) -> Result<NullSpace> {
    let n = a.require_square("null_space")?;
    let sv = shifted_singular(a, shift)?;
    let sigma1 = sv.last().map_or(0.0, |s| s.0);
    let tol = policy.rank_tolerance(n, n, sigma1)?.max(floor);
    let basis: Vec<Vec<Complex64>> = sv
        .iter()
        .take_while(|(s, _)| *s <= tol)
        .map(|(_, v)| v.clone())
        .collect();
    Ok(NullSpace {
        basis,
        tolerance_used: tol,
    })
}

#[derive(Clone, Debug)]
pub(crate) struct NullSpace {
    pub basis: Vec<Vec<Complex64>>,
    pub tolerance_used: f64,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Increasing singular values with right singular vectors of `a - shift I`.
fn shifted_singular(a: &Matrix, shift: ComplexScalar) -> Result<Vec<(f64, Vec<Complex64>)>> {
    complex_right_singular(&CMatrix::shifted_real(a, shift))
}

/// `sqrt(eps)`-style geometric mean of a threshold and the matrix scale.
pub(crate) fn geometric_floor(threshold: f64, scale: f64) -> f64 {
    (threshold * scale).sqrt().max(EPS * scale)
}
