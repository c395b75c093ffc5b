#![allow(dead_code)]

use dx_core::fixtures::{from_blocks, Block, Fixture};
use dx_core::Matrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Square matrices with entries in tenths of `[-10, 10]`.
pub fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-100i32..=100).prop_map(|x| f64::from(x) / 10.0), n * n)
            .prop_map(move |data| Matrix::new(n, n, data).unwrap())
    })
}

/// Orthogonal matrix from a product of Givens rotations.
pub fn orthogonal(n: usize, angles: &[f64]) -> Matrix {
    let mut q = Matrix::identity(n);
    for (k, &theta) in angles.iter().enumerate() {
        if n < 2 {
            break;
        }
        let i = k % n;
        let j = (k + 1 + k / n) % n;
        if i == j {
            continue;
        }
        let (s, c) = theta.sin_cos();
        for r in 0..n {
            let (a, b) = (q[(r, i)], q[(r, j)]);
            q[(r, i)] = c * a - s * b;
            q[(r, j)] = s * a + c * b;
        }
    }
    q
}

pub fn fixture(blocks: Vec<Block>, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    from_blocks(blocks, &mut rng, seed).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}
