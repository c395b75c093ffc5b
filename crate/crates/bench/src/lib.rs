//! Benchmark inputs shared by the bench targets.

use dx_core::fixtures::{generate, FixtureKind, FixtureRequest};
use dx_core::Matrix;

/// Dimensions of the benchmarked matrices; 40 is the largest table profile.
pub const SIZES: [usize; 4] = [5, 10, 20, 40];

/// Deterministic diagonalizable fixture of dimension `n`.
pub fn diagonalizable(n: usize) -> Matrix {
    request(FixtureKind::Diagonalizable, n, None, None)
}

/// Fixture with `n - rank` zero blocks and `nonzero` distinct nonzero eigenvalues.
pub fn rank_profile(n: usize, rank: usize, nonzero: usize) -> Matrix {
    request(FixtureKind::RankProfile, n, Some(rank), Some(nonzero))
}

fn request(kind: FixtureKind, n: usize, rank: Option<usize>, nonzero: Option<usize>) -> Matrix {
    let req = FixtureRequest {
        kind,
        n,
        rank,
        nonzero,
        seed: 0xD1A6,
    };
    generate(&req).expect("benchmark fixture").matrix
}
